#include "capshare/xml/dom.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <tuple>

#include <expat.h>

namespace capshare::xml {

Element &Element::add(Element child) {
    children.push_back(std::move(child));
    return children.back();
}

Element &Element::add(std::string ns_, std::string name_, std::string text_) {
    return add(Element(std::move(ns_), std::move(name_), std::move(text_)));
}

const Element *Element::child(std::string_view ns_, std::string_view name_) const {
    for (const auto &c : children)
        if (c.ns == ns_ && c.name == name_) return &c;
    return nullptr;
}

std::vector<const Element *> Element::children_named(std::string_view ns_,
                                                     std::string_view name_) const {
    std::vector<const Element *> out;
    for (const auto &c : children)
        if (c.ns == ns_ && c.name == name_) out.push_back(&c);
    return out;
}

std::optional<std::string> Element::attribute(std::string_view name_) const {
    for (const auto &a : attributes)
        if (a.ns.empty() && a.name == name_) return a.value;
    return std::nullopt;
}

void Element::set_attribute(std::string name_, std::string value) {
    for (auto &a : attributes)
        if (a.ns.empty() && a.name == name_) {
            a.value = std::move(value);
            return;
        }
    attributes.push_back({{}, std::move(name_), std::move(value)});
}

namespace {

constexpr char kSep = '\x01';
constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Expat triplet form: "uri<sep>local<sep>prefix", "uri<sep>local" or "local".
void split_name(const XML_Char *raw, std::string &ns, std::string &local, std::string *prefix) {
    std::string_view s(raw);
    const auto a = s.find(kSep);
    if (a == std::string_view::npos) {
        ns.clear();
        local = s;
        return;
    }
    ns = s.substr(0, a);
    const auto b = s.find(kSep, a + 1);
    local = s.substr(a + 1, b == std::string_view::npos ? std::string_view::npos : b - a - 1);
    if (prefix != nullptr && b != std::string_view::npos) *prefix = s.substr(b + 1);
}

struct Builder {
    XML_Parser parser = nullptr;
    std::vector<Element> stack;
    std::optional<Element> root;
    std::string error;
};

void on_start(void *data, const XML_Char *name, const XML_Char **atts) {
    auto *b = static_cast<Builder *>(data);
    Element e;
    split_name(name, e.ns, e.name, &e.prefix);
    for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
        Attribute a;
        split_name(atts[i], a.ns, a.name, nullptr);
        a.value = atts[i + 1];
        e.attributes.push_back(std::move(a));
    }
    b->stack.push_back(std::move(e));
}

void on_end(void *data, const XML_Char *) {
    auto *b = static_cast<Builder *>(data);
    Element e = std::move(b->stack.back());
    b->stack.pop_back();
    if (b->stack.empty())
        b->root = std::move(e);
    else
        b->stack.back().children.push_back(std::move(e));
}

void on_text(void *data, const XML_Char *s, int len) {
    auto *b = static_cast<Builder *>(data);
    if (!b->stack.empty()) b->stack.back().text.append(s, std::size_t(len));
}

void on_doctype(void *data, const XML_Char *, const XML_Char *, const XML_Char *, int) {
    auto *b = static_cast<Builder *>(data);
    b->error = "DOCTYPE declarations are not accepted";
    XML_StopParser(b->parser, XML_FALSE);
}

struct ParserDeleter {
    void operator()(XML_ParserStruct *p) const { XML_ParserFree(p); }
};

} // namespace

Element parse(std::string_view document) {
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", kSep));
    if (!parser) throw std::bad_alloc();
    Builder b;
    b.parser = parser.get();
    XML_SetReturnNSTriplet(parser.get(), XML_TRUE);
    XML_SetUserData(parser.get(), &b);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);

    // Feed in bounded pieces so lengths always fit in int.
    constexpr std::size_t kPiece = 1 << 20;
    std::size_t off = 0;
    do {
        const std::size_t n = std::min(kPiece, document.size() - off);
        const bool last = off + n == document.size();
        if (XML_Parse(parser.get(), document.data() + off, int(n), last ? XML_TRUE : XML_FALSE) !=
            XML_STATUS_OK) {
            const long line = long(XML_GetCurrentLineNumber(parser.get()));
            const long col = long(XML_GetCurrentColumnNumber(parser.get()));
            if (!b.error.empty()) throw ParseError(b.error, line, col);
            throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())), line, col);
        }
        off += n;
    } while (off < document.size());
    if (!b.root) throw ParseError("no root element", 1, 0);
    return std::move(*b.root);
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

namespace {

// prefix ("" for the default namespace) -> namespace URI
using Scope = std::map<std::string, std::string>;

void write(const Element &e, const Scope &outer, const WriteOptions &opt, int depth,
           std::string &out) {
    Scope scope = outer;
    std::string decls;
    auto declare = [&](const std::string &prefix, const std::string &uri) {
        auto it = scope.find(prefix);
        if (it != scope.end() && it->second == uri) return;
        scope[prefix] = uri;
        decls += prefix.empty() ? " xmlns=\"" : " xmlns:" + prefix + "=\"";
        decls += escape_attribute(uri);
        decls += '"';
    };

    std::string qname = e.name;
    if (!e.prefix.empty() && !e.ns.empty()) {
        declare(e.prefix, e.ns);
        qname = e.prefix + ":" + e.name;
    } else {
        // Unprefixed: the default namespace must match (possibly reset to "").
        const auto it = scope.find("");
        const std::string current = it == scope.end() ? std::string{} : it->second;
        if (current != e.ns) declare("", e.ns);
    }

    std::string attrs;
    int generated = 0;
    for (const auto &a : e.attributes) {
        std::string name = a.name;
        if (a.ns == kXmlNamespace) {
            name = "xml:" + a.name;
        } else if (!a.ns.empty()) {
            std::string prefix;
            for (const auto &[p, uri] : scope)
                if (!p.empty() && uri == a.ns) prefix = p;
            if (prefix.empty()) {
                prefix = "a" + std::to_string(generated++);
                declare(prefix, a.ns);
            }
            name = prefix + ":" + a.name;
        }
        attrs += " " + name + "=\"" + escape_attribute(a.value) + "\"";
    }

    const std::string pad = opt.indent ? std::string(std::size_t(depth) * 2, ' ') : std::string{};
    out += pad + "<" + qname + decls + attrs;
    if (e.children.empty() && e.text.empty()) {
        out += "/>";
    } else if (e.children.empty()) {
        out += ">" + escape_text(e.text) + "</" + qname + ">";
    } else {
        out += ">";
        const bool pretty = opt.indent && trim(e.text).empty();
        if (!pretty) out += escape_text(e.text);
        for (const auto &c : e.children) {
            if (pretty) out += "\n";
            write(c, scope, opt, pretty ? depth + 1 : 0, out);
        }
        if (pretty) out += "\n" + pad;
        out += "</" + qname + ">";
    }
}

std::string where(const std::string &path, const Element &e) {
    return path + "/{" + e.ns + "}" + e.name;
}

bool compare(const Element &a, const Element &b, const std::string &path, std::string *why) {
    const std::string here = where(path, a);
    auto fail = [&](const std::string &msg) {
        if (why != nullptr) *why = here + ": " + msg;
        return false;
    };
    if (a.ns != b.ns || a.name != b.name)
        return fail("element differs from {" + b.ns + "}" + b.name);
    auto sorted = [](std::vector<Attribute> v) {
        std::sort(v.begin(), v.end(), [](const Attribute &x, const Attribute &y) {
            return std::tie(x.ns, x.name, x.value) < std::tie(y.ns, y.name, y.value);
        });
        return v;
    };
    if (sorted(a.attributes) != sorted(b.attributes)) return fail("attributes differ");
    if (trim(a.text) != trim(b.text))
        return fail("text '" + trim(a.text) + "' vs '" + trim(b.text) + "'");
    if (a.children.size() != b.children.size())
        return fail(std::to_string(a.children.size()) + " children vs " +
                    std::to_string(b.children.size()));
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!compare(a.children[i], b.children[i], here, why)) return false;
    return true;
}

} // namespace

std::string to_string(const Element &root, const WriteOptions &options) {
    std::string out;
    if (options.declaration) out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write(root, Scope{}, options, 0, out);
    out += "\n";
    return out;
}

std::string Element::trimmed_text() const { return trim(text); }

bool canonically_equal(const Element &a, const Element &b, std::string *why) {
    return compare(a, b, "", why);
}

} // namespace capshare::xml
