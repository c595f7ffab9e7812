#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace capshare::xml {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, long line, long column)
        : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line_(line), column_(column) {}
    long line() const { return line_; }
    long column() const { return column_; }

private:
    long line_;
    long column_;
};

struct Attribute {
    std::string ns;
    std::string name;
    std::string value;
    bool operator==(const Attribute &) const = default;
};

/// Namespace-resolved element. `prefix` is only a serialization hint; two
/// elements with the same namespace URI and local name are the same element
/// regardless of prefix.
struct Element {
    std::string ns;
    std::string name;
    std::string prefix;
    std::vector<Attribute> attributes;
    // Character data directly inside this element, concatenated.
    std::string text;
    std::vector<Element> children;

    Element() = default;
    Element(std::string ns_, std::string name_, std::string text_ = {})
        : ns(std::move(ns_)), name(std::move(name_)), text(std::move(text_)) {}

    Element &add(Element child);
    Element &add(std::string ns_, std::string name_, std::string text_ = {});

    const Element *child(std::string_view ns_, std::string_view name_) const;
    std::vector<const Element *> children_named(std::string_view ns_,
                                                std::string_view name_) const;
    // Unqualified attribute lookup.
    std::optional<std::string> attribute(std::string_view name_) const;
    void set_attribute(std::string name_, std::string value);
    std::string trimmed_text() const;
};

/// Parses a complete document. DOCTYPE declarations are rejected.
Element parse(std::string_view document);

struct WriteOptions {
    bool declaration = true;
    bool indent = false;
};

std::string to_string(const Element &root, const WriteOptions &options = {});

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

/// Compares namespace, local name, attributes (unordered), trimmed text and
/// children (ordered). On mismatch `why`, if given, receives a path to the
/// first difference.
bool canonically_equal(const Element &a, const Element &b, std::string *why = nullptr);

} // namespace capshare::xml
