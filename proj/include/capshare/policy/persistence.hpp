#pragma once

#include <filesystem>
#include <stdexcept>

#include "capshare/policy/policy.hpp"

namespace capshare::policy {

inline constexpr const char *kPolicyFormatTag = "capshare-dqn-policy";
inline constexpr const char *kPolicyFileName = "policy.json";

class PolicyLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PolicyVersionError : public PolicyLoadError {
public:
    using PolicyLoadError::PolicyLoadError;
};

/// Writes `dir`/policy.json, creating `dir` if needed. The file is written to a
/// temporary name first and renamed, so readers never see a partial file.
void save_policy(const TrainedPolicy &policy, const std::filesystem::path &dir);

/// Accepts either the policy directory or the policy file itself.
/// Throws PolicyVersionError for an unknown version or format tag and
/// PolicyLoadError for anything else that does not parse into a consistent policy.
TrainedPolicy load_policy(const std::filesystem::path &path);

std::string serialize_policy(const TrainedPolicy &policy);
TrainedPolicy parse_policy(std::string_view text);

} // namespace capshare::policy
