#include "html_reader.hpp"

#include <stdexcept>
#include <string>

namespace tabscore::testsupport {

namespace {

struct Reader {
    std::string_view in;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw std::runtime_error("read_html: " + message + " at offset " + std::to_string(pos));
    }

    bool consume(std::string_view token) {
        if (in.substr(pos, token.size()) == token) {
            pos += token.size();
            return true;
        }
        return false;
    }

    std::string unescape_text() {
        std::string out;
        while (pos < in.size() && in[pos] != '<') {
            if (in[pos] == '&') {
                if (consume("&amp;"))
                    out.push_back('&');
                else if (consume("&lt;"))
                    out.push_back('<');
                else if (consume("&gt;"))
                    out.push_back('>');
                else
                    fail("unknown entity");
            } else {
                out.push_back(in[pos++]);
            }
        }
        return out;
    }

    int read_attr_value() {
        if (!consume("\""))
            fail("expected opening quote");
        int value = 0;
        bool any = false;
        while (pos < in.size() && in[pos] >= '0' && in[pos] <= '9') {
            value = value * 10 + (in[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any || !consume("\""))
            fail("malformed attribute value");
        return value;
    }

    StructNode read_node() {
        StructNode node;
        if (!consume("<"))
            fail("expected '<'");
        std::string_view tag;
        if (consume("table")) {
            node.tag = NodeTag::Table;
            tag = "table";
        } else if (consume("tr")) {
            node.tag = NodeTag::Tr;
            tag = "tr";
        } else if (consume("td")) {
            node.tag = NodeTag::Td;
            tag = "td";
        } else {
            fail("unknown tag");
        }
        if (consume(" colspan="))
            node.colspan = read_attr_value();
        if (consume(" rowspan="))
            node.rowspan = read_attr_value();
        if (!consume(">"))
            fail("expected '>'");
        if (node.tag == NodeTag::Td)
            node.text = unescape_text();
        while (pos < in.size() && in.substr(pos, 2) != "</")
            node.children.push_back(read_node());
        if (!consume("</") || !consume(tag) || !consume(">"))
            fail("expected closing tag");
        return node;
    }
};

} // namespace

StructTree read_html(std::string_view html) {
    Reader reader{html};
    StructTree tree;
    tree.root = reader.read_node();
    if (reader.pos != html.size())
        reader.fail("trailing content");
    if (tree.root.tag != NodeTag::Table)
        throw std::runtime_error("read_html: root is not a table");
    return tree;
}

} // namespace tabscore::testsupport
