#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace tabscore {

namespace {

constexpr size_t kOutputCap = 256 * 1024;

// Child writes errno here if exec fails; the pipe is CLOEXEC so a successful
// exec closes it without writing.
int read_exec_errno(int fd) {
    int err = 0;
    ssize_t n;
    do {
        n = read(fd, &err, sizeof(err));
    } while (n < 0 && errno == EINTR);
    return n == static_cast<ssize_t>(sizeof(err)) ? err : 0;
}

} // namespace

CommandResult run_command(const std::vector<std::string>& argv,
                          const std::string& workdir,
                          double timeout_sec) {
    if (argv.empty())
        throw std::invalid_argument("run_command: empty argv");

    CommandResult result;
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0)
        throw std::runtime_error("run_command: pipe() failed");
    if (pipe(err_pipe) != 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw std::runtime_error("run_command: pipe() failed");
    }
    fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        close(out_pipe[0]); close(out_pipe[1]);
        close(err_pipe[0]); close(err_pipe[1]);
        throw std::runtime_error("run_command: fork() failed");
    }

    if (pid == 0) {
        // Child: own process group so a timeout can kill grandchildren too.
        setpgid(0, 0);
        close(out_pipe[0]);
        close(err_pipe[0]);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        close(out_pipe[1]);
        if (!workdir.empty() && chdir(workdir.c_str()) != 0)
            _exit(126);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv)
            cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        int err = errno;
        ssize_t ignored = write(err_pipe[1], &err, sizeof(err));
        (void)ignored;
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);
    // Both sides set the process group; whichever runs first wins, so the
    // timeout kill below always reaches the whole group.
    setpgid(pid, pid);

    const auto deadline = start + std::chrono::duration<double>(timeout_sec);
    bool killed = false;
    char buf[4096];
    for (;;) {
        auto now = std::chrono::steady_clock::now();
        int wait_ms = -1;
        if (timeout_sec > 0 && !killed) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            if (left <= 0) {
                kill(-pid, SIGKILL);
                killed = true;
                wait_ms = -1;
            } else {
                wait_ms = static_cast<int>(left) + 1;
            }
        }
        struct pollfd pfd{out_pipe[0], POLLIN, 0};
        int pr = poll(&pfd, 1, wait_ms);
        if (pr < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (pr == 0)
            continue; // timeout expired; loop kills on the next pass
        ssize_t n = read(out_pipe[0], buf, sizeof(buf));
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (n == 0)
            break; // EOF: all writers exited
        if (result.output.size() < kOutputCap)
            result.output.append(buf, buf + std::min<size_t>(n, kOutputCap - result.output.size()));
    }
    close(out_pipe[0]);

    int exec_errno = read_exec_errno(err_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.timed_out = killed;
    if (exec_errno != 0) {
        result.spawn_failed = true;
        result.exit_code = 127;
        result.output = std::string(argv[0]) + ": " + std::strerror(exec_errno);
        return result;
    }
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    return result;
}

std::vector<std::string> split_command(std::string_view command) {
    std::vector<std::string> out;
    std::string cur;
    bool in_token = false;
    char quote = 0;
    for (char c : command) {
        if (quote) {
            if (c == quote)
                quote = 0;
            else
                cur.push_back(c);
        } else if (c == '\'' || c == '"') {
            quote = c;
            in_token = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_token) {
                out.push_back(cur);
                cur.clear();
                in_token = false;
            }
        } else {
            cur.push_back(c);
            in_token = true;
        }
    }
    if (quote)
        throw std::invalid_argument("split_command: unterminated quote");
    if (in_token)
        out.push_back(cur);
    return out;
}

std::string substitute_placeholders(std::string_view templ,
                                    const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(templ.size());
    size_t i = 0;
    while (i < templ.size()) {
        if (templ[i] == '{') {
            size_t close = templ.find('}', i + 1);
            if (close != std::string_view::npos) {
                std::string key(templ.substr(i + 1, close - i - 1));
                auto it = vars.find(key);
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(templ[i]);
        ++i;
    }
    return out;
}

} // namespace tabscore
