#include "capshare/netconf/rpc.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace capshare::netconf {

namespace {

struct EditFailure {
    RpcError error;
};

template <class T> std::optional<T> parse_integer(const std::string &text) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

xml::Element policy_element(const nrm::RRMPolicyRatio &p) {
    xml::Element e(kRrmPolicyNs, "rRMPolicyRatio");
    e.add(kRrmPolicyNs, "id", std::to_string(p.snssai.id));
    e.add(kRrmPolicyNs, "attributes")
        .add(kRrmPolicyNs, "rRMPolicyDedicatedRatio", std::to_string(p.dedicated_ratio));
    return e;
}

xml::Element nc(std::string name, std::string text = {}) {
    xml::Element e(kNetconfNs, std::move(name), std::move(text));
    e.prefix = "nc";
    return e;
}

xml::Element rpc_root(const std::string &message_id) {
    auto rpc = nc("rpc");
    rpc.set_attribute("message-id", message_id);
    return rpc;
}

// Reads one entry, reporting bad values as NETCONF errors.
nrm::RRMPolicyRatio read_entry(const xml::Element &e) {
    auto bad = [](std::string tag, std::string msg) {
        return EditFailure{RpcError{"application", std::move(tag), "error", std::move(msg)}};
    };
    if (e.ns != kRrmPolicyNs) throw bad("unknown-namespace", "namespace '" + e.ns + "' not supported");
    if (e.name != "rRMPolicyRatio") throw bad("unknown-element", "unexpected <" + e.name + ">");
    for (const auto &c : e.children) {
        if (c.ns != kRrmPolicyNs)
            throw bad("unknown-namespace", "namespace '" + c.ns + "' not supported");
        if (c.name != "id" && c.name != "attributes")
            throw bad("unknown-element", "unexpected <" + c.name + "> in rRMPolicyRatio");
    }
    const auto *id = e.child(kRrmPolicyNs, "id");
    if (id == nullptr) throw bad("missing-element", "rRMPolicyRatio without <id>");
    const auto id_value = parse_integer<std::uint32_t>(id->trimmed_text());
    if (!id_value) throw bad("invalid-value", "invalid id '" + id->trimmed_text() + "'");

    const auto *attrs = e.child(kRrmPolicyNs, "attributes");
    if (attrs == nullptr) throw bad("missing-element", "rRMPolicyRatio without <attributes>");
    for (const auto &c : attrs->children) {
        if (c.ns != kRrmPolicyNs)
            throw bad("unknown-namespace", "namespace '" + c.ns + "' not supported");
        if (c.name != "rRMPolicyDedicatedRatio")
            throw bad("unknown-element", "unexpected <" + c.name + "> in attributes");
    }
    const auto *ratio = attrs->child(kRrmPolicyNs, "rRMPolicyDedicatedRatio");
    if (ratio == nullptr) throw bad("missing-element", "attributes without rRMPolicyDedicatedRatio");
    const auto value = parse_integer<int>(ratio->trimmed_text());
    if (!value || *value < 0 || *value > 100)
        throw bad("invalid-value", "rRMPolicyDedicatedRatio '" + ratio->trimmed_text() +
                                       "' outside [0,100]");
    return nrm::RRMPolicyRatio{nrm::SNssai{*id_value}, *value};
}

xml::Element reply_root(const xml::Element *request) {
    auto reply = nc("rpc-reply");
    // Replies carry every attribute of the request, message-id included.
    if (request != nullptr) reply.attributes = request->attributes;
    return reply;
}

const xml::Element *first_operation(const xml::Element &rpc) {
    for (const auto &c : rpc.children)
        if (c.ns == kNetconfNs) return &c;
    return nullptr;
}

} // namespace

std::string new_message_id(std::mt19937_64 &rng) {
    std::uniform_int_distribution<unsigned> byte(0, 255);
    unsigned char b[16];
    for (auto &x : b) x = static_cast<unsigned char>(byte(rng));
    b[6] = static_cast<unsigned char>((b[6] & 0x0f) | 0x40);
    b[8] = static_cast<unsigned char>((b[8] & 0x3f) | 0x80);
    char out[64];
    std::snprintf(out, sizeof out,
                  "urn:uuid:%02x%02x%02x%02x-%02x%02x-%02x%02x-%02x%02x-%02x%02x%02x%02x%02x%02x",
                  b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7], b[8], b[9], b[10], b[11], b[12],
                  b[13], b[14], b[15]);
    return out;
}

std::string new_message_id() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    return new_message_id(rng);
}

xml::Element build_edit_config(std::span<const nrm::RRMPolicyRatio> policies,
                               const std::string &message_id) {
    if (policies.empty()) throw std::invalid_argument("edit-config needs at least one policy");
    for (const auto &p : policies)
        if (!p.valid())
            throw std::invalid_argument("rRMPolicyDedicatedRatio " +
                                        std::to_string(p.dedicated_ratio) + " outside [0,100]");
    auto rpc = rpc_root(message_id);
    auto &edit = rpc.add(nc("edit-config"));
    edit.add(nc("target")).add(nc("running"));
    edit.add(nc("test-option", "set"));
    auto &config = edit.add(nc("config"));
    for (const auto &p : policies) config.add(policy_element(p));
    return rpc;
}

xml::Element build_edit_config(std::span<const nrm::RRMPolicyRatio> policies) {
    return build_edit_config(policies, new_message_id());
}

xml::Element build_get_config(const std::string &message_id, std::optional<nrm::SNssai> filter) {
    auto rpc = rpc_root(message_id);
    auto &get = rpc.add(nc("get-config"));
    get.add(nc("source")).add(nc("running"));
    if (filter) {
        auto &f = get.add(nc("filter"));
        f.set_attribute("type", "subtree");
        f.add(kRrmPolicyNs, "rRMPolicyRatio").add(kRrmPolicyNs, "id", std::to_string(filter->id));
    }
    return rpc;
}

xml::Element build_close_session(const std::string &message_id) {
    auto rpc = rpc_root(message_id);
    rpc.add(nc("close-session"));
    return rpc;
}

Operation classify_rpc(const xml::Element &rpc) {
    if (rpc.ns != kNetconfNs || rpc.name != "rpc") return Operation::other;
    const auto *op = first_operation(rpc);
    if (op == nullptr) return Operation::other;
    if (op->name == "edit-config") return Operation::edit_config;
    if (op->name == "get-config") return Operation::get_config;
    if (op->name == "close-session") return Operation::close_session;
    return Operation::other;
}

xml::Element make_ok_reply(const xml::Element &request) {
    auto reply = reply_root(&request);
    reply.add(nc("ok"));
    return reply;
}

xml::Element make_error_reply(const xml::Element *request, const RpcError &error) {
    auto reply = reply_root(request);
    auto &e = reply.add(nc("rpc-error"));
    e.add(nc("error-type", error.type));
    e.add(nc("error-tag", error.tag));
    e.add(nc("error-severity", error.severity));
    if (!error.message.empty()) e.add(nc("error-message", error.message));
    return reply;
}

xml::Element apply_edit_config(PolicyDatastore &store, const xml::Element &rpc) {
    const auto *edit = rpc.child(kNetconfNs, "edit-config");
    if (rpc.ns != kNetconfNs || rpc.name != "rpc" || edit == nullptr)
        return make_error_reply(&rpc, {"protocol", "operation-not-supported", "error",
                                       "expected <rpc><edit-config>"});

    const auto *target = edit->child(kNetconfNs, "target");
    if (target == nullptr || target->child(kNetconfNs, "running") == nullptr)
        return make_error_reply(&rpc, {"protocol", "invalid-value", "error",
                                       "only the running datastore can be edited"});
    bool test_only = false;
    if (const auto *opt = edit->child(kNetconfNs, "test-option")) {
        const auto v = opt->trimmed_text();
        if (v == "test-only")
            test_only = true;
        else if (v != "set" && v != "test-then-set")
            return make_error_reply(&rpc, {"protocol", "invalid-value", "error",
                                           "unsupported test-option '" + v + "'"});
    }

    // Standard placement first, then the sibling placement.
    const xml::Element *config = edit->child(kNetconfNs, "config");
    if (config == nullptr) config = rpc.child(kNetconfNs, "config");
    if (config == nullptr)
        return make_error_reply(&rpc, {"protocol", "missing-element", "error",
                                       "edit-config without <config>"});

    std::vector<nrm::RRMPolicyRatio> entries;
    try {
        for (const auto &e : config->children) entries.push_back(read_entry(e));
    } catch (const EditFailure &f) {
        return make_error_reply(&rpc, f.error);
    }
    if (!test_only && !store.write(entries))
        return make_error_reply(&rpc, {"application", "invalid-value", "error",
                                       "ratio outside [0,100]"});
    return make_ok_reply(rpc);
}

xml::Element get_config(const PolicyDatastore &store, std::optional<nrm::SNssai> filter) {
    auto config = nc("config");
    for (const auto &p : store.entries())
        if (!filter || p.snssai == *filter) config.add(policy_element(p));
    return config;
}

xml::Element handle_rpc(PolicyDatastore &store, const xml::Element &rpc) {
    if (rpc.ns != kNetconfNs || rpc.name != "rpc")
        return make_error_reply(nullptr, {"rpc", "malformed-message", "error", "expected <rpc>"});
    if (!rpc.attribute("message-id"))
        return make_error_reply(&rpc, {"rpc", "missing-attribute", "error",
                                       "rpc without message-id"});
    switch (classify_rpc(rpc)) {
    case Operation::edit_config: return apply_edit_config(store, rpc);
    case Operation::close_session: return make_ok_reply(rpc);
    case Operation::get_config: {
        const auto *get = first_operation(rpc);
        const auto *source = get->child(kNetconfNs, "source");
        if (source == nullptr || source->child(kNetconfNs, "running") == nullptr)
            return make_error_reply(&rpc, {"protocol", "invalid-value", "error",
                                           "only the running datastore can be read"});
        std::optional<nrm::SNssai> filter;
        if (const auto *f = get->child(kNetconfNs, "filter")) {
            const auto *entry = f->child(kRrmPolicyNs, "rRMPolicyRatio");
            const auto *id = entry != nullptr ? entry->child(kRrmPolicyNs, "id") : nullptr;
            if (id != nullptr) {
                const auto v = parse_integer<std::uint32_t>(id->trimmed_text());
                if (!v)
                    return make_error_reply(&rpc, {"protocol", "invalid-value", "error",
                                                   "invalid filter id"});
                filter = nrm::SNssai{*v};
            } else if (entry == nullptr && !f->children.empty()) {
                // Filter on a subtree this server does not hold: nothing matches.
                auto reply = reply_root(&rpc);
                reply.add(nc("data"));
                return reply;
            }
        }
        auto config = get_config(store, filter);
        auto reply = reply_root(&rpc);
        auto &data = reply.add(nc("data"));
        data.children = std::move(config.children);
        return reply;
    }
    case Operation::other: break;
    }
    const auto *op = first_operation(rpc);
    return make_error_reply(&rpc, {"protocol", "operation-not-supported", "error",
                                   op != nullptr ? "<" + op->name + "> not supported"
                                                 : "empty rpc"});
}

std::vector<nrm::RRMPolicyRatio> parse_policy_ratios(const xml::Element &parent) {
    std::vector<nrm::RRMPolicyRatio> out;
    for (const auto &e : parent.children) {
        try {
            out.push_back(read_entry(e));
        } catch (const EditFailure &f) {
            throw std::invalid_argument(f.error.message);
        }
    }
    return out;
}

std::optional<RpcError> reply_error(const xml::Element &reply) {
    const auto *e = reply.child(kNetconfNs, "rpc-error");
    if (e == nullptr) return std::nullopt;
    RpcError err;
    auto text = [&](const char *name) {
        const auto *c = e->child(kNetconfNs, name);
        return c != nullptr ? c->trimmed_text() : std::string{};
    };
    err.type = text("error-type");
    err.tag = text("error-tag");
    err.severity = text("error-severity");
    err.message = text("error-message");
    return err;
}

} // namespace capshare::netconf
