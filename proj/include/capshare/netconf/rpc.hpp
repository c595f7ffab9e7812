#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "capshare/netconf/datastore.hpp"
#include "capshare/netconf/session.hpp"
#include "capshare/nrm/types.hpp"
#include "capshare/xml/dom.hpp"

namespace capshare::netconf {

inline constexpr const char *kRrmPolicyNs = "urn:3gpp:sa5:_3gpp-nr-nrm-rrmpolicy";

/// "urn:uuid:" followed by a random (version 4) UUID.
std::string new_message_id(std::mt19937_64 &rng);
std::string new_message_id();

/// <rpc><edit-config> targeting running with test-option "set" and one
/// rRMPolicyRatio per entry, in input order. Throws std::invalid_argument on an
/// empty list or an out-of-range ratio.
xml::Element build_edit_config(std::span<const nrm::RRMPolicyRatio> policies,
                               const std::string &message_id);
xml::Element build_edit_config(std::span<const nrm::RRMPolicyRatio> policies);

xml::Element build_get_config(const std::string &message_id,
                              std::optional<nrm::SNssai> filter = std::nullopt);
xml::Element build_close_session(const std::string &message_id);

struct RpcError {
    std::string type = "application";
    std::string tag;
    std::string severity = "error";
    std::string message;
};

enum class Operation { edit_config, get_config, close_session, other };

/// Operation named by the first child of an <rpc>.
Operation classify_rpc(const xml::Element &rpc);

/// Applies every rRMPolicyRatio in the request or none. Accepts <config>
/// either inside <edit-config> or as its sibling under <rpc>. Returns an
/// <rpc-reply> echoing the request's attributes with <ok/> or <rpc-error>.
xml::Element apply_edit_config(PolicyDatastore &store, const xml::Element &rpc);

/// <config> holding the current entries sorted by id, or only `filter`.
xml::Element get_config(const PolicyDatastore &store,
                        std::optional<nrm::SNssai> filter = std::nullopt);

/// Serves one request: edit-config, get-config or close-session.
xml::Element handle_rpc(PolicyDatastore &store, const xml::Element &rpc);

xml::Element make_ok_reply(const xml::Element &request);
xml::Element make_error_reply(const xml::Element *request, const RpcError &error);

/// Reads rRMPolicyRatio entries below `parent` (a <config> or <data>).
/// Throws std::invalid_argument on malformed entries.
std::vector<nrm::RRMPolicyRatio> parse_policy_ratios(const xml::Element &parent);

/// rpc-error fields of a reply, if it carries one.
std::optional<RpcError> reply_error(const xml::Element &reply);

} // namespace capshare::netconf
