#include "capshare/policy/persistence.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace capshare::policy {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd &v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json &j, Eigen::Index rows, Eigen::Index cols,
                                 const char *what) {
    if (!j.is_array() || Eigen::Index(j.size()) != rows)
        throw PolicyLoadError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto &row = j[std::size_t(r)];
        if (!row.is_array() || Eigen::Index(row.size()) != cols)
            throw PolicyLoadError(std::string(what) + ": row " + std::to_string(r) + " has wrong width");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[std::size_t(c)].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json &j, Eigen::Index size, const char *what) {
    if (!j.is_array() || Eigen::Index(j.size()) != size)
        throw PolicyLoadError(std::string(what) + ": expected " + std::to_string(size) + " values");
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = j[std::size_t(i)].get<double>();
    return v;
}

json tenant_to_json(const TenantPolicy &t) {
    const auto &n = t.network;
    return json{
        {"snssai", t.snssai.id},
        {"actions", t.actions.deltas},
        {"normalization", {{"shift", t.normalization.shift}, {"scale", t.normalization.scale}}},
        {"network",
         {{"inputs", n.w1.cols()},
          {"hidden", n.w1.rows()},
          {"outputs", n.w2.rows()},
          {"w1", matrix_to_json(n.w1)},
          {"b1", vector_to_json(n.b1)},
          {"w2", matrix_to_json(n.w2)},
          {"b2", vector_to_json(n.b2)}}},
    };
}

TenantPolicy tenant_from_json(const json &j) {
    TenantPolicy t;
    t.snssai.id = j.at("snssai").get<std::uint32_t>();
    t.actions.deltas = j.at("actions").get<std::vector<int>>();
    if (!t.actions.valid())
        throw PolicyLoadError("snssai " + std::to_string(t.snssai.id) + ": invalid action set");
    t.normalization.shift = j.at("normalization").at("shift").get<StateVector>();
    t.normalization.scale = j.at("normalization").at("scale").get<StateVector>();

    const auto &n = j.at("network");
    const auto inputs = n.at("inputs").get<Eigen::Index>();
    const auto hidden = n.at("hidden").get<Eigen::Index>();
    const auto outputs = n.at("outputs").get<Eigen::Index>();
    if (inputs != Eigen::Index(kStateSize))
        throw PolicyLoadError("network expects " + std::to_string(inputs) + " inputs, not " +
                              std::to_string(kStateSize));
    if (hidden <= 0 || outputs != Eigen::Index(t.actions.size()))
        throw PolicyLoadError("network shape does not match the action set");
    t.network.w1 = matrix_from_json(n.at("w1"), hidden, inputs, "w1");
    t.network.b1 = vector_from_json(n.at("b1"), hidden, "b1");
    t.network.w2 = matrix_from_json(n.at("w2"), outputs, hidden, "w2");
    t.network.b2 = vector_from_json(n.at("b2"), outputs, "b2");
    if (!t.network.all_finite()) throw PolicyLoadError("network holds non-finite weights");
    return t;
}

} // namespace

std::string serialize_policy(const TrainedPolicy &policy) {
    json tenants = json::array();
    for (const auto &t : policy.tenants) tenants.push_back(tenant_to_json(t));
    json doc{{"format", kPolicyFormatTag}, {"version", policy.version}, {"tenants", tenants}};
    return doc.dump(1) + "\n";
}

TrainedPolicy parse_policy(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw PolicyLoadError(std::string("corrupt policy file: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", std::string{}) != kPolicyFormatTag)
            throw PolicyVersionError("not a policy file (missing format tag)");
        const int version = doc.at("version").get<int>();
        if (version != kPolicyFormatVersion)
            throw PolicyVersionError("unsupported policy version " + std::to_string(version) +
                                     " (expected " + std::to_string(kPolicyFormatVersion) + ")");
        TrainedPolicy policy;
        policy.version = version;
        for (const auto &t : doc.at("tenants")) {
            auto tenant = tenant_from_json(t);
            if (policy.find(tenant.snssai) != nullptr)
                throw PolicyLoadError("duplicate snssai " + std::to_string(tenant.snssai.id));
            policy.tenants.push_back(std::move(tenant));
        }
        return policy;
    } catch (const json::exception &e) {
        throw PolicyLoadError(std::string("malformed policy file: ") + e.what());
    }
}

void save_policy(const TrainedPolicy &policy, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const auto target = dir / kPolicyFileName;
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << serialize_policy(policy);
        if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

TrainedPolicy load_policy(const std::filesystem::path &path) {
    const auto file = std::filesystem::is_directory(path) ? path / kPolicyFileName : path;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw PolicyLoadError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_policy(buf.str());
}

} // namespace capshare::policy
