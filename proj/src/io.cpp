#include "blowup/io.hpp"

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "blowup/bvp.hpp"
#include "blowup/errors.hpp"
#include "blowup/numfmt.hpp"

namespace blowup::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_json(const json& j, const fs::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return json::parse(in);
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    require(header.size() == columns.size(), "CSV header and column count differ");
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& c : columns) require(c.size() == rows, "CSV columns differ in length");
    auto out = open_out(path);
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << format17(columns[k][i]);
        out << '\n';
    }
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty CSV");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= t.columns.size()) throw std::runtime_error(path.string() + ": too many cells on line " + std::to_string(row));
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::runtime_error(path.string() + ": bad number '" + cell + "' on line " + std::to_string(row));
            t.columns[k++].push_back(v);
        }
        if (k != t.columns.size()) throw std::runtime_error(path.string() + ": short line " + std::to_string(row));
    }
    return t;
}

fs::path sidecar_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".json");
    return p;
}

void write_profile(const Profile& profile, const fs::path& csv, double tol) {
    write_csv(csv, {"y", "F"}, {profile.mesh.nodes, profile.values});
    json j;
    j["format"] = "blowuplab-profile";
    j["version"] = 1;
    j["params"] = {{"n", profile.params.n}, {"p", profile.params.p}, {"eps", profile.params.eps}};
    j["bc"] = to_string(profile.bc);
    j["normalization"] = profile.norm == Normalization::scaled ? "scaled" : "physical";
    j["residual_norm"] = profile.residual_norm;
    j["converged"] = profile.converged;
    j["newton_iters"] = profile.newton_iters;
    j["tol"] = tol;
    j["mesh"] = {{"N", profile.mesh.size()},
                 {"R", profile.mesh.R()},
                 {"half", profile.mesh.half},
                 {"spacing", profile.mesh.spacing == Spacing::uniform ? "uniform" : "graded"},
                 {"grade_center", profile.mesh.grade_center},
                 {"grade_strength", profile.mesh.grade_strength}};
    write_json(j, sidecar_path(csv));
}

Profile read_profile(const fs::path& csv) {
    const auto t = read_csv(csv);
    if (t.header != std::vector<std::string>{"y", "F"}) throw std::runtime_error(csv.string() + ": expected header y,F");
    const json j = read_json(sidecar_path(csv));
    if (j.value("format", "") != "blowuplab-profile") throw std::runtime_error(csv.string() + ": sidecar is not a profile descriptor");
    Profile p;
    p.mesh.nodes = t.columns[0];
    p.values = t.columns[1];
    const auto& m = j.at("mesh");
    p.mesh.half = m.at("half").get<bool>();
    p.mesh.spacing = m.at("spacing").get<std::string>() == "graded" ? Spacing::graded : Spacing::uniform;
    p.mesh.grade_center = m.at("grade_center").get<double>();
    p.mesh.grade_strength = m.at("grade_strength").get<double>();
    if (m.at("N").get<std::size_t>() != p.mesh.size())
        throw std::runtime_error(csv.string() + ": node count disagrees with sidecar");
    p.mesh.validate();
    p.params.n = j.at("params").at("n").get<double>();
    p.params.p = j.at("params").at("p").get<double>();
    p.params.eps = j.at("params").at("eps").get<double>();
    p.params.validate();
    p.bc = boundary_from_string(j.at("bc").get<std::string>());
    p.norm = j.at("normalization").get<std::string>() == "physical" ? Normalization::physical : Normalization::scaled;
    p.newton_iters = j.value("newton_iters", 0);
    p.residual_norm = residual_norm(p);
    p.converged = j.value("converged", false) && p.residual_norm <= j.value("tol", 1e-6);
    return p;
}

void write_kernel(const KernelTable& table, const fs::path& csv) {
    write_csv(csv, {"y", "F", "F1", "F2"}, {table.y, table.F, table.F1, table.F2});
}

void write_pairings(const std::vector<std::vector<double>>& matrix, const fs::path& csv) {
    std::vector<double> l, k, v;
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t c = 0; c < matrix[i].size(); ++c) {
            l.push_back(static_cast<double>(i));
            k.push_back(static_cast<double>(c));
            v.push_back(matrix[i][c]);
        }
    write_csv(csv, {"l", "k", "pairing"}, {l, k, v});
}

void write_trajectory(const std::vector<OscState>& samples, const fs::path& csv) {
    std::vector<double> s, a, b, c;
    for (const auto& x : samples) {
        s.push_back(x.s);
        a.push_back(x.phi);
        b.push_back(x.phi1);
        c.push_back(x.phi2);
    }
    write_csv(csv, {"s", "phi", "phi1", "phi2"}, {s, a, b, c});
}

void write_branch_curve(const Branch& branch, const fs::path& csv) {
    std::vector<double> p, s, r, c;
    for (const auto& x : branch.records) {
        p.push_back(x.p);
        s.push_back(x.sup_norm);
        r.push_back(x.residual_norm);
        c.push_back(x.converged ? 1.0 : 0.0);
    }
    write_csv(csv, {"p", "sup_norm", "residual", "converged"}, {p, s, r, c});
}

void write_branch_manifest(const Branch& branch, BranchEnd end, const fs::path& path) {
    json j;
    j["format"] = "blowuplab-branch";
    j["label"] = branch.label;
    j["n"] = branch.n;
    j["direction"] = to_string(branch.direction);
    j["schedule"] = branch.schedule;
    j["stop_reason"] = branch.stop_reason;
    j["end"] = to_string(end);
    json recs = json::array();
    for (const auto& r : branch.records)
        recs.push_back({{"p", r.p},
                        {"sup_norm", r.sup_norm},
                        {"ratio_fstar", r.sup_norm},
                        {"residual", r.residual_norm},
                        {"converged", r.converged},
                        {"newton_iters", r.newton_iters},
                        {"halvings", r.halvings},
                        {"change_rate", r.change_rate},
                        {"profile", r.profile_ref}});
    j["records"] = recs;
    write_json(j, path);
}

void write_classification(const MultiIndex& index, int transversal, const fs::path& path) {
    json j;
    j["multiindex"] = index.to_string();
    json toks = json::array();
    for (std::size_t k = 0; k < index.tokens.size(); ++k)
        toks.push_back({{"level", index.tokens[k].level},
                        {"count", index.tokens[k].count},
                        {"signed", index.tokens[k].signed_count()},
                        {"locations", index.locations[k]}});
    j["tokens"] = toks;
    j["transversal_zeros"] = transversal;
    write_json(j, path);
}

}  // namespace blowup::io
