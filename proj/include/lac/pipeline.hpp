#pragma once

// Pipeline plumbing for the CLI: a plain key = value configuration drives the
// stage chain check -> heteroclinic -> spectrum -> m2l-table -> hetero2d ->
// prism -> assemble -> plot. Every stage persists a JSON summary whose config
// hash downstream stages verify before trusting the artifacts, so stale or
// missing inputs fail fast instead of silently mixing runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lac/assemble.hpp"
#include "lac/common.hpp"
#include "lac/one_dim.hpp"
#include "lac/potential.hpp"
#include "lac/prism3d.hpp"
#include "lac/strip2d.hpp"

namespace lac {

using ojson = nlohmann::ordered_json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
    PotentialSpec potential;

    double x_1d = 10.0, h_1d = 0.01;

    double strip_x = 10.0, strip_h = 0.05;
    std::vector<double> widths = {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0};
    double hetero_y = 16.0;

    int fold = 2;
    double prism_x = 8.0, prism_z = 12.0;
    double prism_hx = 0.1, prism_hy = 0.15, prism_hz = 0.15;

    int resolution = 24;     // volumetric export samples per axis
    double box_half = 0.0;   // 0: derived from the prism height

    int max_iter = 30000;
    double grad_tol_1d = 1e-7, grad_tol_2d = 1e-6, grad_tol_3d = 2e-6;

    std::string out_dir = "out";
    uint64_t seed = 20260823ull;
    std::set<std::string> disabled;  // stage toggles from config
};

inline const std::vector<std::string>& pipeline_stage_names() {
    static const std::vector<std::string> names = {"check",    "heteroclinic", "spectrum",
                                                   "m2l-table", "hetero2d",    "prism",
                                                   "assemble", "plot"};
    return names;
}

inline void validate_config(const RunConfig& c) {
    require(c.h_1d > 0.0 && c.strip_h > 0.0 && c.prism_hx > 0.0 && c.prism_hy > 0.0 &&
                c.prism_hz > 0.0,
            "config: grid spacings must be positive");
    require(c.x_1d > 0.0 && c.strip_x > 0.0 && c.prism_x > 0.0 && c.prism_z > 0.0 &&
                c.hetero_y > 0.0,
            "config: domain extents must be positive");
    require(!c.widths.empty(), "config: strip.L list is empty");
    for (size_t i = 0; i + 1 < c.widths.size(); ++i)
        require(c.widths[i] < c.widths[i + 1], "config: strip.L must be strictly ascending");
    require(c.widths.front() > 0.0, "config: strip widths must be positive");
    require(c.fold >= 2, "config: prism.j must be at least 2");
    require(c.resolution >= 2, "config: assemble.resolution must be at least 2");
    require(c.box_half >= 0.0, "config: assemble.box must be non-negative");
    require(c.max_iter >= 1, "config: optimize.max_iter must be positive");
    require(c.grad_tol_1d > 0.0 && c.grad_tol_2d > 0.0 && c.grad_tol_3d > 0.0,
            "config: gradient tolerances must be positive");
    require(!c.out_dir.empty(), "config: output.dir is empty");
}

namespace pipedetail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw invalid_input("config: bad numeric value for " + key + ": '" + v + "'");
    return d;
}

inline long to_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long d = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw invalid_input("config: bad integer value for " + key + ": '" + v + "'");
    return d;
}

inline bool to_flag(const std::string& key, const std::string& v) {
    if (v == "1" || v == "on" || v == "true") return true;
    if (v == "0" || v == "off" || v == "false") return false;
    throw invalid_input("config: bad flag value for " + key + ": '" + v + "'");
}

}  // namespace pipedetail

// "key = value" lines; '#' starts a comment; duplicate keys are rejected.
inline std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = pipedetail::trim(line);
        if (t.empty()) continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw invalid_input("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = pipedetail::trim(t.substr(0, eq));
        const std::string val = pipedetail::trim(t.substr(eq + 1));
        if (key.empty()) throw invalid_input("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, val).second)
            throw invalid_input("config: duplicate key '" + key + "'");
    }
    return kv;
}

inline RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
    using pipedetail::to_double;
    using pipedetail::to_flag;
    using pipedetail::to_long;
    RunConfig c;
    for (const auto& [key, val] : kv) {
        if (key == "potential.family") c.potential.family = val;
        else if (key == "potential.alpha") c.potential.alpha = to_double(key, val);
        else if (key == "potential.gamma") c.potential.gamma = to_double(key, val);
        else if (key == "grid1d.X") c.x_1d = to_double(key, val);
        else if (key == "grid1d.h") c.h_1d = to_double(key, val);
        else if (key == "strip.X") c.strip_x = to_double(key, val);
        else if (key == "strip.h") c.strip_h = to_double(key, val);
        else if (key == "strip.Y") c.hetero_y = to_double(key, val);
        else if (key == "strip.L") {
            c.widths.clear();
            std::istringstream ls(val);
            std::string tok;
            while (std::getline(ls, tok, ','))
                c.widths.push_back(to_double(key, pipedetail::trim(tok)));
        } else if (key == "prism.j") c.fold = static_cast<int>(to_long(key, val));
        else if (key == "prism.X") c.prism_x = to_double(key, val);
        else if (key == "prism.Z") c.prism_z = to_double(key, val);
        else if (key == "prism.hx") c.prism_hx = to_double(key, val);
        else if (key == "prism.hy") c.prism_hy = to_double(key, val);
        else if (key == "prism.hz") c.prism_hz = to_double(key, val);
        else if (key == "assemble.resolution") c.resolution = static_cast<int>(to_long(key, val));
        else if (key == "assemble.box") c.box_half = to_double(key, val);
        else if (key == "optimize.max_iter") c.max_iter = static_cast<int>(to_long(key, val));
        else if (key == "optimize.grad_tol_1d") c.grad_tol_1d = to_double(key, val);
        else if (key == "optimize.grad_tol_2d") c.grad_tol_2d = to_double(key, val);
        else if (key == "optimize.grad_tol_3d") c.grad_tol_3d = to_double(key, val);
        else if (key == "output.dir") c.out_dir = val;
        else if (key == "seed") c.seed = static_cast<uint64_t>(to_long(key, val));
        else if (key.rfind("stages.", 0) == 0) {
            const std::string name = key.substr(7);
            const auto& names = pipeline_stage_names();
            if (std::find(names.begin(), names.end(), name) == names.end())
                throw invalid_input("config: unknown stage toggle '" + key + "'");
            if (!to_flag(key, val)) c.disabled.insert(name);
        } else {
            throw invalid_input("config: unknown key '" + key + "'");
        }
    }
    validate_config(c);
    return c;
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f << text;
    f.close();
    if (!f) throw io_error("write to " + path + " failed");
}

inline RunConfig load_config(const std::string& path) {
    return config_from_map(parse_kv(read_text(path)));
}

// ---------------------------------------------------------------------------
// stage hashing: which configuration fields feed which stage

inline uint64_t stage_hash(const RunConfig& c, const std::string& stage) {
    std::string s = stage + "|" + c.potential.family + "," + fmt17(c.potential.alpha) + "," +
                    fmt17(c.potential.gamma) + "|it=" + std::to_string(c.max_iter);
    auto add = [&s](const std::string& tag, double v) { s += "|" + tag + "=" + fmt17(v); };
    if (stage == "check" || stage == "heteroclinic" || stage == "spectrum") {
        add("X", c.x_1d);
        add("h", c.h_1d);
        add("tol", c.grad_tol_1d);
        if (stage == "spectrum") s += "|seed=" + std::to_string(c.seed);
    } else if (stage == "m2l-table" || stage == "strip" || stage == "hetero2d") {
        add("X", c.strip_x);
        add("h", c.strip_h);
        add("tol1", c.grad_tol_1d);
        add("tol2", c.grad_tol_2d);
        if (stage == "m2l-table")
            for (double w : c.widths) add("L", w);
        if (stage == "hetero2d") add("Y", c.hetero_y);
    } else if (stage == "prism" || stage == "assemble") {
        s += "|j=" + std::to_string(c.fold);
        add("X", c.prism_x);
        add("Z", c.prism_z);
        add("hx", c.prism_hx);
        add("hy", c.prism_hy);
        add("hz", c.prism_hz);
        add("tol1", c.grad_tol_1d);
        add("tol2", c.grad_tol_2d);
        add("tol3", c.grad_tol_3d);
        if (stage == "assemble") {
            s += "|res=" + std::to_string(c.resolution);
            add("box", c.box_half);
            s += "|seed=" + std::to_string(c.seed);
        }
    }
    return fnv1a(s);
}

inline uint64_t config_digest(const RunConfig& c) {
    std::string s;
    for (const auto& name : pipeline_stage_names()) s += hex64(stage_hash(c, name)) + ";";
    for (const auto& d : c.disabled) s += "-" + d;
    // deliberately excludes out_dir: the digest names the computation, not its location
    s += "|seed=" + std::to_string(c.seed);
    return fnv1a(s);
}

// ---------------------------------------------------------------------------
// CSV helpers

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ",";
        out += header[i];
    }
    out += "\n";
    for (const auto& row : rows) {
        require(row.size() == header.size(), "write_csv: ragged row");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += fmt17(row[i]);
        }
        out += "\n";
    }
    write_text(path, out);
}

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvData read_csv(const std::string& path) {
    const std::string text = read_text(path);
    std::istringstream in(text);
    std::string line;
    CsvData d;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) cells.push_back(tok);
        if (first) {
            d.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw io_error(path + ": non-numeric cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != d.header.size()) throw io_error(path + ": ragged csv row");
        d.rows.push_back(std::move(row));
    }
    if (first) throw io_error(path + ": empty csv");
    return d;
}

// ---------------------------------------------------------------------------
// stage records and the manifest

struct StageRecord {
    std::string name;
    std::map<std::string, std::string> inputs;   // config and upstream hashes
    std::vector<std::string> outputs;            // file names inside the out dir
    std::map<std::string, std::string> scalars;  // printed with %.17g
    std::vector<std::string> notes;
    long long wall_ms = 0;
};

struct StageManifest {
    std::string config_digest;
    std::string halted;  // empty when the pipeline ran to the end
    std::vector<StageRecord> stages;

    const StageRecord* find(const std::string& name) const {
        for (const auto& s : stages)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline std::string path_join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir + ": " + ec.message());
}

inline ojson stage_to_json(const StageRecord& r) {
    ojson j;
    j["stage"] = r.name;
    j["config_hash"] = r.inputs.at("config");
    ojson up = ojson::object();
    for (const auto& [k, v] : r.inputs)
        if (k != "config") up[k] = v;
    if (!up.empty()) j["upstream"] = up;
    j["scalars"] = ojson::object();
    for (const auto& [k, v] : r.scalars) j["scalars"][k] = v;
    j["outputs"] = r.outputs;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

inline void write_stage_file(const std::string& dir, const StageRecord& r) {
    write_text(path_join(dir, r.name + ".json"), stage_to_json(r).dump(2) + "\n");
}

inline ojson load_stage_file(const std::string& dir, const std::string& stage) {
    const std::string path = path_join(dir, stage + ".json");
    if (!std::filesystem::exists(path))
        throw io_error("dependency: stage '" + stage + "' has not produced " + path +
                       "; run it first");
    try {
        return ojson::parse(read_text(path));
    } catch (const std::exception& e) {
        throw io_error(path + ": cannot parse stage summary: " + e.what());
    }
}

// Refuses missing or stale upstream artifacts and returns their config hash.
inline std::string require_fresh(const RunConfig& c, const std::string& stage) {
    const ojson j = load_stage_file(c.out_dir, stage);
    const std::string want = hex64(stage_hash(c, stage));
    const std::string got = j.value("config_hash", std::string());
    if (got != want)
        throw io_error("stale artifact: stage '" + stage +
                       "' was produced from a different configuration; re-run it");
    for (const auto& f : j.value("outputs", std::vector<std::string>{}))
        if (!std::filesystem::exists(path_join(c.out_dir, f)))
            throw io_error("dependency: output '" + f + "' of stage '" + stage + "' is missing");
    return got;
}

inline double stage_scalar(const ojson& j, const std::string& key) {
    const auto& s = j.at("scalars");
    if (!s.contains(key)) throw io_error("stage summary lacks scalar '" + key + "'");
    return std::strtod(s.at(key).get<std::string>().c_str(), nullptr);
}

inline void save_manifest(const StageManifest& m, const std::string& dir) {
    ojson j;
    j["config_digest"] = m.config_digest;
    j["halted"] = m.halted;
    ojson summary = ojson::object();
    auto pull = [&](const char* stage, const char* key, const char* as) {
        if (const StageRecord* r = m.find(stage)) {
            auto it = r->scalars.find(key);
            if (it != r->scalars.end()) summary[as] = it->second;
        }
    };
    pull("heteroclinic", "m1", "m1");
    pull("check", "m1", "m1");
    pull("spectrum", "omega_star", "omega_star");
    pull("check", "omega_star", "omega_star");
    pull("m2l-table", "m2", "m2");
    pull("m2l-table", "table_digest", "m2l_digest");
    pull("prism", "value", "m3_proxy");
    j["summary"] = summary;
    j["stages"] = ojson::array();
    for (const auto& r : m.stages) {
        ojson e = stage_to_json(r);
        e["wall_ms"] = r.wall_ms;
        j["stages"].push_back(e);
    }
    write_text(path_join(dir, "manifest.json"), j.dump(2) + "\n");
}

inline StageManifest load_manifest(const std::string& dir) {
    const std::string path = path_join(dir, "manifest.json");
    ojson j;
    try {
        j = ojson::parse(read_text(path));
    } catch (const std::exception& e) {
        throw io_error(path + ": cannot parse manifest: " + e.what());
    }
    StageManifest m;
    m.config_digest = j.value("config_digest", std::string());
    m.halted = j.value("halted", std::string());
    for (const auto& e : j.value("stages", ojson::array())) {
        StageRecord r;
        r.name = e.value("stage", std::string());
        r.inputs["config"] = e.value("config_hash", std::string());
        if (e.contains("upstream"))
            for (const auto& [k, v] : e.at("upstream").items()) r.inputs[k] = v;
        if (e.contains("scalars"))
            for (const auto& [k, v] : e.at("scalars").items()) r.scalars[k] = v;
        r.outputs = e.value("outputs", std::vector<std::string>{});
        if (e.contains("notes")) r.notes = e.value("notes", std::vector<std::string>{});
        r.wall_ms = e.value("wall_ms", 0ll);
        m.stages.push_back(std::move(r));
    }
    return m;
}

// ---------------------------------------------------------------------------
// solver option plumbing

inline HeteroOptions hetero_options(const RunConfig& c) {
    HeteroOptions h;
    h.opt.grad_tol = c.grad_tol_1d;
    h.opt.max_iter = c.max_iter;
    return h;
}

inline StripSolveOptions strip_options(const RunConfig& c) {
    StripSolveOptions s;
    s.opt.grad_tol = c.grad_tol_2d;
    s.opt.max_iter = c.max_iter;
    return s;
}

inline PrismOptions prism_options(const RunConfig& c) {
    PrismOptions o;
    o.opt.grad_tol = c.grad_tol_3d;
    o.opt.max_iter = c.max_iter;
    return o;
}

namespace pipedetail {

struct StageTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

inline void put(StageRecord& r, const std::string& key, double v) { r.scalars[key] = fmt17(v); }
inline void put(StageRecord& r, const std::string& key, int v) {
    r.scalars[key] = std::to_string(v);
}
inline void put_flag(StageRecord& r, const std::string& key, bool v) {
    r.scalars[key] = v ? "1" : "0";
}

inline StageRecord begin_stage(const RunConfig& c, const std::string& name) {
    ensure_dir(c.out_dir);
    StageRecord r;
    r.name = name;
    r.inputs["config"] = hex64(stage_hash(c, name));
    r.outputs.push_back(name + ".json");
    return r;
}

}  // namespace pipedetail

// ---------------------------------------------------------------------------
// stages

inline StageRecord stage_check(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "check");
    const Potential p(c.potential);

    const HypothesesReport hyp = validate_hypotheses(p);
    put_flag(r, "hypotheses_ok", hyp.ok());
    r.notes = hyp.failures;

    if (hyp.ok()) {
        const Grid1D g = make_grid_1d(c.x_1d, c.h_1d);
        const HeteroclinicSet set = find_heteroclinics(p, g, hetero_options(c));
        std::vector<SpectralReport> spectra;
        for (const auto& m : set.minimizers)
            spectra.push_back(second_variation_smallest(p, m.profile));
        const Certificate cert = certify_conditions(set, spectra, 1e-6);
        put(r, "m1", set.m1);
        put(r, "scalar_energy", set.scalar_energy);
        put(r, "separation", set.separation);
        put(r, "n_minimizers", static_cast<int>(set.minimizers.size()));
        put(r, "min_abs_q2_zero", cert.min_abs_q2_zero);
        put(r, "omega_star", cert.omega_star);
        put_flag(r, "star", cert.nondegenerate_set);
        put_flag(r, "star2", cert.coercive_second_variation);
        for (const auto& n : cert.notes) r.notes.push_back(n);
    } else {
        put_flag(r, "star", false);
        put_flag(r, "star2", false);
    }
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_heteroclinic(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "heteroclinic");
    const Potential p(c.potential);
    const Grid1D g = make_grid_1d(c.x_1d, c.h_1d);
    const HeteroclinicSet set = find_heteroclinics(p, g, hetero_options(c));

    for (size_t k = 0; k < set.minimizers.size(); ++k) {
        const Profile1D& q = set.minimizers[k].profile;
        std::vector<std::vector<double>> rows;
        rows.reserve(g.n);
        for (int i = 0; i < g.n; ++i) rows.push_back({g.x(i), q.c1[i], q.c2[i]});
        const std::string file = "profile_" + std::to_string(k) + ".csv";
        write_csv(path_join(c.out_dir, file), {"x", "q1", "q2"}, rows);
        r.outputs.push_back(file);
    }

    double omega = 1e300;
    for (const auto& m : set.minimizers)
        omega = std::min(omega, second_variation_smallest(p, m.profile).omega_star);
    // the tube radius only frames the fit window; the hypothesis-driven
    // delta_bar can be far too tight for that on short domains
    const double tube = std::max(well_constants(p).delta_bar, 0.25);
    const DecayFit decay = fit_tail_decay(set.minimizers.front().profile, p.spec().well_plus, tube);

    put(r, "m1", set.m1);
    put(r, "scalar_energy", set.scalar_energy);
    put(r, "separation", set.separation);
    put(r, "d0", set.d0);
    put(r, "n_minimizers", static_cast<int>(set.minimizers.size()));
    put(r, "q2_at_zero", set.minimizers.front().q2_at_zero);
    put(r, "omega_star", omega);
    put(r, "decay_rate", decay.rate);
    put(r, "decay_prefactor", decay.prefactor);
    put(r, "decay_r2", decay.r2);
    r.notes = set.notes;
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_spectrum(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "spectrum");
    const Potential p(c.potential);
    const Grid1D g = make_grid_1d(c.x_1d, c.h_1d);
    const HeteroclinicSet set = find_heteroclinics(p, g, hetero_options(c));

    double omega = 1e300;
    SpectralReport lowest;
    for (const auto& m : set.minimizers) {
        SpectralReport rep = second_variation_smallest(p, m.profile);
        if (rep.omega_star < omega) {
            omega = rep.omega_star;
            lowest = rep;
        }
    }
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < g.n; ++i) rows.push_back({g.x(i), lowest.mode1[i], lowest.mode2[i]});
    write_csv(path_join(c.out_dir, "spectrum_mode.csv"), {"x", "mode1", "mode2"}, rows);
    r.outputs.push_back("spectrum_mode.csv");

    put(r, "omega_star", omega);
    put(r, "dim", lowest.dim);
    if (omega > 0.0) {
        const GrowthProbe growth = probe_quadratic_growth(p, set, omega, 20, 0.05, c.seed);
        put(r, "growth_min_ratio", growth.min_ratio);
        put(r, "growth_probes", growth.probes);
        put_flag(r, "growth_ok", growth.all_ok);
    }
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_m2l(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "m2l-table");
    const Potential p(c.potential);
    const StripBaseline base = make_strip_baseline(p, c.strip_x, c.strip_h, hetero_options(c));
    const WidthTable t = m2l_table(p, base, c.strip_h, c.widths, strip_options(c));

    std::vector<std::vector<double>> rows;
    std::string digest_src;
    for (size_t k = 0; k < t.widths.size(); ++k) {
        const double fit = (t.fit_points >= 2)
                               ? t.m2 - t.gap_prefactor * std::exp(-t.gap_rate * t.widths[k])
                               : t.values[k];
        rows.push_back({t.widths[k], t.values[k], t.m2 - t.values[k], fit});
        digest_src += fmt17(t.widths[k]) + ":" + fmt17(t.values[k]) + ";";
    }
    write_csv(path_join(c.out_dir, "m2l_table.csv"), {"L", "m2L", "gap", "fit"}, rows);
    r.outputs.push_back("m2l_table.csv");

    int scalar_entries = 0;
    for (char s : t.scalar_branch) scalar_entries += s ? 1 : 0;
    put(r, "m2", t.m2);
    put(r, "gap_rate", t.gap_rate);
    put(r, "gap_prefactor", t.gap_prefactor);
    put(r, "fit_r2", t.fit_r2);
    put(r, "fit_points", t.fit_points);
    put(r, "n_entries", static_cast<int>(t.widths.size()));
    put(r, "scalar_entries", scalar_entries);
    put(r, "m1_slice", base.m1_slice);
    put(r, "scalar_slice", base.scalar_slice);
    put(r, "omega_star", base.omega_star);
    r.scalars["table_digest"] = hex64(fnv1a(digest_src));
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_hetero2d(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "hetero2d");
    const Potential p(c.potential);
    const StripBaseline base = make_strip_baseline(p, c.strip_x, c.strip_h, hetero_options(c));
    const Hetero2DResult h = solve_hetero2d(p, base, c.hetero_y, c.strip_h, strip_options(c));

    const StripGrid& g = h.field.grid;
    std::vector<std::vector<double>> rows;
    rows.reserve(g.nodes());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            rows.push_back({g.x(i), g.y(j), h.field.v1[g.at(i, j)], h.field.v2[g.at(i, j)]});
    write_csv(path_join(c.out_dir, "hetero2d_field.csv"), {"x", "y", "v1", "v2"}, rows);
    r.outputs.push_back("hetero2d_field.csv");

    rows.clear();
    for (int j = 0; j < g.ny; ++j)
        rows.push_back({g.y(j), h.decay.slice_l2[j], h.decay.slice_sup[j]});
    write_csv(path_join(c.out_dir, "hetero2d_slices.csv"), {"y", "l2_dist", "sup_dist"}, rows);
    r.outputs.push_back("hetero2d_slices.csv");

    put(r, "value", h.value);
    put(r, "grad_norm", h.grad_norm);
    put(r, "iterations", h.iterations);
    put_flag(r, "converged", h.converged);
    put(r, "midline_distance", h.midline_distance);
    put(r, "pair_half_gap", h.pair_half_gap);
    put(r, "decay_rate", h.decay.fit.rate);
    put(r, "decay_r2", h.decay.fit.r2);
    put(r, "ratio_start_end", h.decay.ratio_start_end);
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_strip(const RunConfig& c, double width) {
    using namespace pipedetail;
    require(width > 0.0, "strip: width must be positive");
    StageTimer timer;
    StageRecord r = begin_stage(c, "strip");
    const Potential p(c.potential);
    const StripBaseline base = make_strip_baseline(p, c.strip_x, c.strip_h, hetero_options(c));
    const StripGrid g = make_strip_grid(c.strip_x, width, c.strip_h, c.strip_h);
    const StripResult res = solve_PL2(p, base, g, strip_options(c));

    std::vector<std::vector<double>> rows;
    rows.reserve(g.nodes());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            rows.push_back({g.x(i), g.y(j), res.field.v1[g.at(i, j)], res.field.v2[g.at(i, j)]});
    write_csv(path_join(c.out_dir, "strip_field.csv"), {"x", "y", "v1", "v2"}, rows);
    r.outputs.push_back("strip_field.csv");

    put(r, "L", width);
    put(r, "value", res.value);
    put(r, "grad_norm", res.grad_norm);
    put(r, "iterations", res.iterations);
    put_flag(r, "converged", res.converged);
    put_flag(r, "scalar_branch", res.scalar_branch);
    put(r, "scalar_value", res.scalar_value);
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline StageRecord stage_prism(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "prism");
    r.inputs["m2l-table"] = require_fresh(c, "m2l-table");
    r.inputs["hetero2d"] = require_fresh(c, "hetero2d");

    const Potential p(c.potential);
    const StripBaseline base = make_strip_baseline(p, c.prism_x, c.prism_hx, hetero_options(c));
    const PrismGrid g =
        make_prism_grid(c.fold, c.prism_x, c.prism_z, c.prism_hx, c.prism_hy, c.prism_hz);
    std::vector<double> widths;
    for (int m = 1; m <= g.cap_m(); ++m) widths.push_back(m * g.hy);
    const WidthTable table = m2l_table(p, base, g.hy, widths, strip_options(c));
    const Hetero2DResult vq = solve_hetero2d(p, base, g.cap_m() * g.hy, g.hy, strip_options(c));
    const PrismResult res = solve_prism(p, base, table, vq.field, g, prism_options(c));

    std::vector<std::vector<double>> rows;
    rows.reserve(g.nodes());
    for (int k = 0; k < g.nz; ++k)
        for (int jy = 0; jy <= g.m[k]; ++jy)
            for (int i = 0; i < g.nx; ++i)
                rows.push_back({g.x(i), g.y(jy), g.z(k), res.field.v1[g.at(k, jy, i)],
                                res.field.v2[g.at(k, jy, i)]});
    write_csv(path_join(c.out_dir, "prism_field.csv"), {"x", "y", "z", "u1", "u2"}, rows);
    r.outputs.push_back("prism_field.csv");

    const SliceTrack track = track_slices(p, base, table, res.field, vq.field);
    rows.clear();
    double min_excess = 1e300;
    for (size_t k = 0; k < track.z.size(); ++k) {
        rows.push_back({track.z[k], track.l2[k], track.sup[k], track.energy_excess[k]});
        min_excess = std::min(min_excess, track.energy_excess[k]);
    }
    write_csv(path_join(c.out_dir, "prism_slices.csv"),
              {"z", "l2_dist_to_vq", "sup_dist", "slice_energy_gap"}, rows);
    r.outputs.push_back("prism_slices.csv");

    const FarFieldReport ff = check_far_field(res.field);
    put(r, "value", res.value);
    put(r, "seed_value", res.seed_value);
    put(r, "grad_norm", res.grad_norm);
    put(r, "iterations", res.iterations);
    put_flag(r, "converged", res.converged);
    put(r, "internal_m2", table.m2);
    put(r, "cap_width", g.cap_m() * g.hy);
    put(r, "min_slice_excess", min_excess);
    put(r, "farfield_rate", ff.rate);
    put(r, "farfield_r2", ff.r2);
    put_flag(r, "farfield_monotone", ff.monotone);
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

inline Field3D load_prism_field(const std::string& path, const PrismGrid& g) {
    const CsvData d = read_csv(path);
    if (d.header != std::vector<std::string>{"x", "y", "z", "u1", "u2"})
        throw io_error(path + ": unexpected prism field header");
    if (d.rows.size() != g.nodes())
        throw io_error(path + ": row count does not match the prism grid");
    Field3D f = make_prism_field(g);
    size_t row = 0;
    for (int k = 0; k < g.nz; ++k)
        for (int jy = 0; jy <= g.m[k]; ++jy)
            for (int i = 0; i < g.nx; ++i, ++row) {
                const auto& cells = d.rows[row];
                if (std::fabs(cells[0] - g.x(i)) > 1e-9 || std::fabs(cells[1] - g.y(jy)) > 1e-9 ||
                    std::fabs(cells[2] - g.z(k)) > 1e-9)
                    throw io_error(path + ": node coordinates do not match the prism grid");
                f.v1[g.at(k, jy, i)] = cells[3];
                f.v2[g.at(k, jy, i)] = cells[4];
            }
    return f;
}

inline StageRecord stage_assemble(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "assemble");
    r.inputs["prism"] = require_fresh(c, "prism");

    const Potential p(c.potential);
    const StripBaseline base = make_strip_baseline(p, c.prism_x, c.prism_hx, hetero_options(c));
    const PrismGrid g =
        make_prism_grid(c.fold, c.prism_x, c.prism_z, c.prism_hx, c.prism_hy, c.prism_hz);
    const Field3D field = load_prism_field(path_join(c.out_dir, "prism_field.csv"), g);
    const ReflectionAssembly a = make_assembly(field, base);

    const AssemblyReport rep = check_assembly(a, 200, c.seed);
    std::vector<std::vector<double>> rows;
    for (size_t ray = 0; ray < rep.ray_dist.size(); ++ray) {
        const double theta = M_PI / 2.0 + (M_PI / c.fold) * (0.5 + ray);
        for (size_t k = 0; k < rep.ray_rho.size(); ++k)
            rows.push_back({static_cast<double>(ray), theta, rep.ray_rho[k], rep.ray_dist[ray][k]});
    }
    write_csv(path_join(c.out_dir, "midray.csv"), {"ray", "theta", "rho", "sup_dist"}, rows);
    r.outputs.push_back("midray.csv");

    double bh = c.box_half > 0.0 ? c.box_half : 0.65 * g.z_extent;
    const double bx = std::min(bh, g.x_extent);
    const ExportBox box{-bx, bx, -bh, bh, -bh, bh};
    export_field3d(a, box, c.resolution, c.resolution, c.resolution,
                   path_join(c.out_dir, "assembly.vtk"));
    r.outputs.push_back("assembly.vtk");

    put(r, "periodicity_max", rep.periodicity_max);
    put(r, "face_jump_max", rep.face_jump_max);
    put(r, "interp_error", rep.interp_error);
    put(r, "ray_worst_far", rep.ray_worst_far);
    put_flag(r, "rays_decreasing", rep.rays_decreasing);
    put(r, "box_half", bh);
    put(r, "resolution", c.resolution);
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

// ---------------------------------------------------------------------------
// plots

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool points_only = false;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    std::vector<PlotSeries> series;
    bool log_y = false;
};

namespace pipedetail {

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmtg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace pipedetail

inline std::string render_svg(const PlotSpec& ps) {
    require(!ps.series.empty(), "render_svg: no series");
    const double W = 640, H = 440, L = 70, R = 620, T = 40, B = 390;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    auto ty = [&ps](double v) {
        return ps.log_y ? std::log10(std::max(v, 1e-300)) : v;
    };
    for (const auto& s : ps.series) {
        require(s.x.size() == s.y.size(), "render_svg: ragged series");
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (ps.log_y && s.y[i] < 1e-15) continue;  // below fp noise: skip
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, ty(s.y[i]));
            yhi = std::max(yhi, ty(s.y[i]));
        }
    }
    require(xlo <= xhi && ylo <= yhi, "render_svg: no plottable points");
    if (xhi - xlo < 1e-300) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-300) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const double xpad = 0.04 * (xhi - xlo), ypad = 0.06 * (yhi - ylo);
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;
    auto mx = [&](double v) { return L + (v - xlo) / (xhi - xlo) * (R - L); };
    auto my = [&](double v) { return B - (ty(v) - ylo) / (yhi - ylo) * (B - T); };
    auto myt = [&](double t) { return B - (t - ylo) / (yhi - ylo) * (B - T); };

    using pipedetail::fmt2;
    using pipedetail::fmtg;
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmtg(W) + "\" height=\"" +
         fmtg(H) + "\" viewBox=\"0 0 " + fmtg(W) + " " + fmtg(H) + "\">\n";
    s += "<rect width=\"" + fmtg(W) + "\" height=\"" + fmtg(H) + "\" fill=\"white\"/>\n";
    s += "<rect x=\"" + fmt2(L) + "\" y=\"" + fmt2(T) + "\" width=\"" + fmt2(R - L) +
         "\" height=\"" + fmt2(B - T) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt2((L + R) / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"14\">" + ps.title + "</text>\n";
    s += "<text x=\"" + fmt2((L + R) / 2) + "\" y=\"" + fmt2(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" + ps.xlabel +
         "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt2((T + B) / 2) + "\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 16 " +
         fmt2((T + B) / 2) + ")\">" + ps.ylabel + "</text>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xv = xlo + (xhi - xlo) * i / 4.0;
        const double px = mx(xv);
        s += "<line x1=\"" + fmt2(px) + "\" y1=\"" + fmt2(B) + "\" x2=\"" + fmt2(px) +
             "\" y2=\"" + fmt2(B + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt2(px) + "\" y=\"" + fmt2(B + 18) +
             "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" + fmtg(xv) +
             "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double tv = ylo + (yhi - ylo) * i / 4.0;
        const double py = myt(tv);
        s += "<line x1=\"" + fmt2(L - 5) + "\" y1=\"" + fmt2(py) + "\" x2=\"" + fmt2(L) +
             "\" y2=\"" + fmt2(py) + "\" stroke=\"black\"/>\n";
        const std::string label = ps.log_y ? ("1e" + fmtg(tv)) : fmtg(tv);
        s += "<text x=\"" + fmt2(L - 8) + "\" y=\"" + fmt2(py + 4) +
             "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + label +
             "</text>\n";
    }

    for (const auto& ser : ps.series) {
        if (ser.points_only) {
            for (size_t i = 0; i < ser.x.size(); ++i) {
                if (ps.log_y && ser.y[i] < 1e-15) continue;
                s += "<circle cx=\"" + fmt2(mx(ser.x[i])) + "\" cy=\"" + fmt2(my(ser.y[i])) +
                     "\" r=\"3\" fill=\"" + ser.color + "\"/>\n";
            }
        } else {
            std::string path;
            bool pen_up = true;
            for (size_t i = 0; i < ser.x.size(); ++i) {
                if (ps.log_y && ser.y[i] < 1e-15) {
                    pen_up = true;
                    continue;
                }
                path += (pen_up ? "M" : "L");
                path += fmt2(mx(ser.x[i])) + " " + fmt2(my(ser.y[i])) + " ";
                pen_up = false;
            }
            if (!path.empty())
                s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + ser.color +
                     "\" stroke-width=\"1.5\"/>\n";
        }
    }
    double ly = T + 16;
    for (const auto& ser : ps.series) {
        s += "<text x=\"" + fmt2(R - 8) + "\" y=\"" + fmt2(ly) +
             "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\"" +
             ser.color + "\">" + ser.label + "</text>\n";
        ly += 14;
    }
    s += "</svg>\n";
    return s;
}

inline const char* plot_color(size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};
    return palette[i % 8];
}

inline StageRecord stage_plot(const RunConfig& c) {
    using namespace pipedetail;
    StageTimer timer;
    StageRecord r = begin_stage(c, "plot");
    int plots = 0;
    auto have = [&](const std::string& f) {
        if (std::filesystem::exists(path_join(c.out_dir, f))) return true;
        r.notes.push_back("skipping a plot: missing " + f);
        return false;
    };

    if (have("profile_0.csv")) {
        PlotSpec ps;
        ps.title = "transition profiles";
        ps.xlabel = "x";
        ps.ylabel = "components";
        size_t color = 0;
        for (int k = 0;; ++k) {
            const std::string file = "profile_" + std::to_string(k) + ".csv";
            if (!std::filesystem::exists(path_join(c.out_dir, file))) break;
            const CsvData d = read_csv(path_join(c.out_dir, file));
            PlotSeries s1, s2;
            const std::string tag = k == 0 ? "" : " (branch " + std::to_string(k) + ")";
            s1.label = "q1" + tag;
            s2.label = "q2" + tag;
            s1.color = plot_color(color++);
            s2.color = plot_color(color++);
            for (const auto& row : d.rows) {
                s1.x.push_back(row[0]);
                s1.y.push_back(row[1]);
                s2.x.push_back(row[0]);
                s2.y.push_back(row[2]);
            }
            ps.series.push_back(std::move(s1));
            ps.series.push_back(std::move(s2));
        }
        write_text(path_join(c.out_dir, "profiles.svg"), render_svg(ps));
        r.outputs.push_back("profiles.svg");
        ++plots;
    }

    if (have("m2l_table.csv") && have("m2l-table.json")) {
        const CsvData d = read_csv(path_join(c.out_dir, "m2l_table.csv"));
        const ojson meta = load_stage_file(c.out_dir, "m2l-table");
        const double m2 = stage_scalar(meta, "m2");
        const double rate = stage_scalar(meta, "gap_rate");
        const double pref = stage_scalar(meta, "gap_prefactor");
        const int fit_points = static_cast<int>(stage_scalar(meta, "fit_points"));
        PlotSpec ps;
        ps.title = "strip minimum against the width";
        ps.xlabel = "L";
        ps.ylabel = "m2L";
        PlotSeries pts;
        pts.label = "computed";
        pts.points_only = true;
        for (const auto& row : d.rows) {
            pts.x.push_back(row[0]);
            pts.y.push_back(row[1]);
        }
        PlotSeries fit;
        fit.label = "fit";
        fit.color = plot_color(1);
        if (fit_points >= 2 && !pts.x.empty()) {
            for (int i = 0; i <= 60; ++i) {
                const double L = pts.x.front() + (pts.x.back() - pts.x.front()) * i / 60.0;
                fit.x.push_back(L);
                fit.y.push_back(m2 - pref * std::exp(-rate * L));
            }
        }
        PlotSeries asym;
        asym.label = "limit";
        asym.color = plot_color(2);
        if (!pts.x.empty()) {
            asym.x = {pts.x.front(), pts.x.back()};
            asym.y = {m2, m2};
        }
        ps.series.push_back(std::move(pts));
        if (!fit.x.empty()) ps.series.push_back(std::move(fit));
        if (!asym.x.empty()) ps.series.push_back(std::move(asym));
        write_text(path_join(c.out_dir, "m2l_curve.svg"), render_svg(ps));
        r.outputs.push_back("m2l_curve.svg");
        ++plots;
    }

    {
        PlotSpec ps;
        ps.title = "slice distances along the transition directions";
        ps.xlabel = "slice coordinate";
        ps.ylabel = "L2 distance";
        ps.log_y = true;
        if (std::filesystem::exists(path_join(c.out_dir, "hetero2d_slices.csv"))) {
            const CsvData d = read_csv(path_join(c.out_dir, "hetero2d_slices.csv"));
            PlotSeries s;
            s.label = "strip rows";
            for (const auto& row : d.rows) {
                s.x.push_back(row[0]);
                s.y.push_back(row[1]);
            }
            ps.series.push_back(std::move(s));
        }
        if (std::filesystem::exists(path_join(c.out_dir, "prism_slices.csv"))) {
            const CsvData d = read_csv(path_join(c.out_dir, "prism_slices.csv"));
            PlotSeries s;
            s.label = "prism levels";
            s.color = plot_color(1);
            for (const auto& row : d.rows) {
                s.x.push_back(row[0]);
                s.y.push_back(row[1]);
            }
            ps.series.push_back(std::move(s));
        }
        if (!ps.series.empty()) {
            write_text(path_join(c.out_dir, "slice_decay.svg"), render_svg(ps));
            r.outputs.push_back("slice_decay.svg");
            ++plots;
        } else {
            r.notes.push_back("skipping slice_decay.svg: no slice csv present");
        }
    }

    if (have("midray.csv")) {
        const CsvData d = read_csv(path_join(c.out_dir, "midray.csv"));
        PlotSpec ps;
        ps.title = "wall ray distance to the transition pair";
        ps.xlabel = "rho";
        ps.ylabel = "sup distance";
        std::map<int, PlotSeries> rays;
        for (const auto& row : d.rows) {
            const int ray = static_cast<int>(row[0]);
            PlotSeries& s = rays[ray];
            if (s.x.empty()) {
                s.label = "wall " + std::to_string(ray);
                s.color = plot_color(static_cast<size_t>(ray));
            }
            s.x.push_back(row[2]);
            s.y.push_back(row[3]);
        }
        for (auto& [ray, s] : rays) ps.series.push_back(std::move(s));
        write_text(path_join(c.out_dir, "midray.svg"), render_svg(ps));
        r.outputs.push_back("midray.svg");
        ++plots;
    }

    put(r, "n_plots", plots);
    r.wall_ms = timer.ms();
    write_stage_file(c.out_dir, r);
    return r;
}

// ---------------------------------------------------------------------------
// the pipeline

inline StageManifest run_pipeline(const RunConfig& c) {
    validate_config(c);
    ensure_dir(c.out_dir);
    StageManifest m;
    m.config_digest = hex64(config_digest(c));
    const auto enabled = [&c](const char* name) { return c.disabled.count(name) == 0; };

    if (enabled("check")) {
        StageRecord r = stage_check(c);
        const bool hyp = r.scalars.at("hypotheses_ok") == "1";
        const bool star = r.scalars.at("star") == "1";
        const bool star2 = r.scalars.at("star2") == "1";
        m.stages.push_back(std::move(r));
        if (!hyp) m.halted = "hypotheses fail";
        else if (!star) m.halted = "(*) fails";
        else if (!star2) m.halted = "(**) fails";
        if (!m.halted.empty()) {
            save_manifest(m, c.out_dir);
            return m;
        }
    }
    if (enabled("heteroclinic")) m.stages.push_back(stage_heteroclinic(c));
    if (enabled("spectrum")) m.stages.push_back(stage_spectrum(c));
    if (enabled("m2l-table")) m.stages.push_back(stage_m2l(c));
    if (enabled("hetero2d")) m.stages.push_back(stage_hetero2d(c));
    if (enabled("prism")) m.stages.push_back(stage_prism(c));
    if (enabled("assemble")) m.stages.push_back(stage_assemble(c));
    if (enabled("plot")) m.stages.push_back(stage_plot(c));
    save_manifest(m, c.out_dir);
    return m;
}

}  // namespace lac
