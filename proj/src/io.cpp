#include "warped/io.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "warped/errors.hpp"
#include "warped/numerics.hpp"
#include "warped/version.hpp"

namespace warped {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string profile_to_csv(const Profile& p) {
    std::string out = "x,phi,psi\n";
    for (int i = 0; i < p.grid.node_count(); ++i) {
        out += fmt17(p.grid.x[i]);
        out += ',';
        out += fmt17(p.phi[i]);
        out += ',';
        out += fmt17(p.psi[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, int row, const char* what) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end)))
        ++end;
    if (end == begin || (end && *end))
        throw IngestionError(std::string("csv: cannot parse ") + what + " at row " + std::to_string(row), row);
    return v;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

} // namespace

Profile parse_profile_csv(const std::string& text, int n) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw IngestionError("csv: empty profile file", 0);
    if (trim(line) != "x,phi,psi")
        throw IngestionError("csv: expected header 'x,phi,psi'", 0);

    Profile p;
    p.n = n;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++row;
        auto parts = split(line, ',');
        if (parts.size() != 3)
            throw IngestionError("csv: expected 3 columns at row " + std::to_string(row), row);
        const double x = parse_double(parts[0], row, "x");
        const double phi = parse_double(parts[1], row, "phi");
        const double psi = parse_double(parts[2], row, "psi");
        if (row == 1) {
            if (x != 0.0)
                throw IngestionError("csv: first node must be x = 0 (row 1)", 1);
            if (psi != 0.0)
                throw IngestionError("csv: psi(0) must be exactly 0 (row 1)", 1);
        } else {
            if (!(x > p.grid.x.back()))
                throw IngestionError("csv: x must be strictly ascending (row " + std::to_string(row) + ")", row);
            if (!(psi > 0.0))
                throw IngestionError("csv: psi must be positive away from the origin (row " +
                                     std::to_string(row) + ")", row);
        }
        if (!(phi > 0.0) || !std::isfinite(phi) || !std::isfinite(psi) || !std::isfinite(x))
            throw IngestionError("csv: phi must be positive and all values finite (row " +
                                 std::to_string(row) + ")", row);
        p.grid.x.push_back(x);
        p.phi.push_back(phi);
        p.psi.push_back(psi);
    }
    if (p.grid.node_count() < 9)
        throw IngestionError("csv: need at least 9 nodes (M >= 8)", row);
    return p;
}

void write_profile_csv(const Profile& p, const std::filesystem::path& path) {
    write_text_file(path, profile_to_csv(p));
}

Profile load_profile_csv(const std::filesystem::path& path, int n) {
    return parse_profile_csv(read_text_file(path), n);
}

std::string field_to_csv(const Profile& p, const CurvatureField& f) {
    std::string out = "x,s,psi_s,psi_ss,K0,K1,R,H,V\n";
    for (int i = 0; i < f.node_count(); ++i) {
        out += fmt17(p.grid.x[i]);
        out += ',';
        out += fmt17(f.s[i]);
        out += ',';
        out += fmt17(f.psi_s[i]);
        out += ',';
        out += fmt17(f.psi_ss[i]);
        out += ',';
        out += fmt17(f.K0[i]);
        out += ',';
        out += fmt17(f.K1[i]);
        out += ',';
        out += fmt17(f.R[i]);
        out += ',';
        out += fmt17(f.H[i]);
        out += ',';
        out += fmt17(f.V[i]);
        out += '\n';
    }
    return out;
}

const char* outer_bc_name(OuterBc bc) {
    return bc == OuterBc::dirichlet_exact_hyperbolic ? "dirichlet_exact_hyperbolic"
                                                     : "extrapolate_zero_curvature_gradient";
}

const char* scalar_bound_variant_name(ScalarBoundVariant v) {
    return v == ScalarBoundVariant::d_n ? "d_n" : "d_n_plus_1";
}

std::string series_csv(const TrajectoryDiagnostics& diag) {
    std::string out = "t,sup_abs_K0,sup_abs_K1,inf_R,sup_R,min_psi_s,min_psi_ss";
    for (double r : diag.mass.radii)
        out += ",mass_r" + fmt_short(r);
    out += '\n';
    for (const StateReport& s : diag.states) {
        const SeriesRow& r = s.series;
        out += fmt17(r.t);
        for (double v : {r.sup_abs_K0, r.sup_abs_K1, r.inf_R, r.sup_R, r.min_psi_s, r.min_psi_ss}) {
            out += ',';
            out += fmt17(v);
        }
        for (double v : r.mass) {
            out += ',';
            out += fmt17(v);
        }
        out += '\n';
    }
    return out;
}

std::string mass_series_csv(const MassProbeSeries& mass) {
    std::string out = "t";
    for (double r : mass.radii)
        out += ",mass_r" + fmt_short(r);
    out += '\n';
    for (std::size_t k = 0; k < mass.times.size(); ++k) {
        out += fmt17(mass.times[k]);
        for (double v : mass.masses[k]) {
            out += ',';
            out += fmt17(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

void append_check_json(std::string& j, const CheckRecord& r, const char* indent) {
    j += indent;
    j += "{\"name\": \"" + r.name + "\", \"pass\": " + (r.pass ? "true" : "false");
    j += std::string(", \"boundary_case\": ") + (r.boundary_case ? "true" : "false");
    j += std::string(", \"applicable\": ") + (r.applicable ? "true" : "false");
    j += ", \"margin\": " + fmt17(r.margin);
    j += ", \"worst_node\": " + std::to_string(r.worst_node);
    if (!r.details.empty()) {
        j += ", \"details\": {";
        for (std::size_t i = 0; i < r.details.size(); ++i) {
            j += (i ? ", " : "");
            j += "\"" + r.details[i].first + "\": " + fmt17(r.details[i].second);
        }
        j += "}";
    }
    j += "}";
}

} // namespace

std::string diagnostics_json(const TrajectoryDiagnostics& diag) {
    std::string j = "[\n";
    for (std::size_t k = 0; k < diag.states.size(); ++k) {
        const StateReport& s = diag.states[k];
        j += "  {\"t\": " + fmt17(s.t) + ", \"checks\": [\n";
        bool first = true;
        for (const CheckRecord& r : s.checks) {
            if (!first)
                j += ",\n";
            first = false;
            append_check_json(j, r, "    ");
        }
        if (k + 1 == diag.states.size())
            for (const CheckRecord& r : diag.trajectory_checks) {
                if (!first)
                    j += ",\n";
                first = false;
                append_check_json(j, r, "    ");
            }
        j += "\n  ]}";
        j += (k + 1 < diag.states.size()) ? ",\n" : "\n";
    }
    j += "]\n";
    return j;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "n", "L", "M", "stretch", "cfl", "t_end", "outer_bc", "preset", "psi_csv",
        "modified", "record_every", "out_dir", "lambda2", "eps", "x_c", "width",
        "tail_start", "class_c1", "class_c2", "scalar_bound_variant", "mass_probes",
    };
    return keys;
}

double to_double(const std::string& v, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const double d = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("config: value of '" + key + "' is not a number: " + v);
    return d;
}

int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    if (d != std::floor(d) || std::abs(d) > 2e9)
        throw ConfigError("config: value of '" + key + "' is not an integer: " + v);
    return static_cast<int>(d);
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw ConfigError("config: value of '" + key + "' is not a boolean: " + v);
}

} // namespace

FlowConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    bool saw_n = false, saw_L = false, saw_M = false, saw_t_end = false, saw_preset = false;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value', got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw ConfigError("config: unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = val;
    }

    FlowConfig c;
    for (const auto& [key, val] : kv) {
        if (key == "n") { c.n = to_int(val, key); saw_n = true; }
        else if (key == "L") { c.L = to_double(val, key); saw_L = true; }
        else if (key == "M") { c.M = to_int(val, key); saw_M = true; }
        else if (key == "stretch") c.stretch = to_double(val, key);
        else if (key == "cfl") c.cfl = to_double(val, key);
        else if (key == "t_end") { c.t_end = to_double(val, key); saw_t_end = true; }
        else if (key == "outer_bc") {
            if (val == "dirichlet_exact_hyperbolic") c.outer_bc = OuterBc::dirichlet_exact_hyperbolic;
            else if (val == "extrapolate_zero_curvature_gradient")
                c.outer_bc = OuterBc::extrapolate_zero_curvature_gradient;
            else throw ConfigError("config: unknown outer_bc '" + val + "'");
        }
        else if (key == "preset") {
            auto k = preset_from_name(val);
            if (!k)
                throw ConfigError("config: unknown preset '" + val + "'");
            c.preset.kind = *k;
            saw_preset = true;
        }
        else if (key == "psi_csv") c.preset.csv_path = val;
        else if (key == "modified") c.modified = to_bool(val, key);
        else if (key == "record_every") c.record_every = to_int(val, key);
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "lambda2") c.preset.lambda2 = to_double(val, key);
        else if (key == "eps") c.preset.eps = to_double(val, key);
        else if (key == "x_c") c.preset.x_c = to_double(val, key);
        else if (key == "width") c.preset.width = to_double(val, key);
        else if (key == "tail_start") c.tail_start = to_double(val, key);
        else if (key == "class_c1") c.class_c1 = to_double(val, key);
        else if (key == "class_c2") c.class_c2 = to_double(val, key);
        else if (key == "scalar_bound_variant") {
            if (val == "d_n") c.scalar_bound_variant = ScalarBoundVariant::d_n;
            else if (val == "d_n_plus_1") c.scalar_bound_variant = ScalarBoundVariant::d_n_plus_1;
            else throw ConfigError("config: unknown scalar_bound_variant '" + val + "'");
        }
        else if (key == "mass_probes") {
            c.mass_probes.clear();
            for (const std::string& part : split(val, ','))
                if (!trim(part).empty())
                    c.mass_probes.push_back(to_double(trim(part), key));
        }
    }
    if (!saw_n || !saw_L || !saw_M || !saw_t_end || !saw_preset)
        throw ConfigError("config: required keys are n, L, M, t_end, preset");
    validate_config(c);
    return c;
}

FlowConfig load_config_file(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

std::string config_to_text(const FlowConfig& c) {
    std::string out;
    auto add = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    add("preset", preset_name(c.preset.kind));
    add("n", std::to_string(c.n));
    add("L", fmt17(c.L));
    add("M", std::to_string(c.M));
    add("stretch", fmt17(c.stretch));
    add("cfl", fmt17(c.cfl));
    add("t_end", fmt17(c.t_end));
    add("outer_bc", outer_bc_name(c.outer_bc));
    add("modified", c.modified ? "true" : "false");
    add("record_every", std::to_string(c.record_every));
    add("out_dir", c.out_dir);
    if (c.preset.kind == PresetKind::scaled_hyperbolic)
        add("lambda2", fmt17(c.preset.lambda2));
    if (c.preset.kind == PresetKind::perturbed_hyperbolic) {
        add("eps", fmt17(c.preset.eps));
        add("x_c", fmt17(c.preset.x_c));
        add("width", fmt17(c.preset.width));
    }
    if (c.preset.kind == PresetKind::from_csv)
        add("psi_csv", c.preset.csv_path);
    add("tail_start", fmt17(c.effective_tail_start()));
    add("class_c1", fmt17(c.class_c1));
    add("class_c2", fmt17(c.class_c2));
    add("scalar_bound_variant", scalar_bound_variant_name(c.scalar_bound_variant));
    std::string probes;
    for (std::size_t i = 0; i < c.mass_probes.size(); ++i)
        probes += (i ? "," : "") + fmt17(c.mass_probes[i]);
    add("mass_probes", probes);
    return out;
}

std::string manifest_to_json(const RunManifest& m) {
    auto esc = [](const std::string& s) {
        std::string out;
        for (char ch : s) {
            if (ch == '"' || ch == '\\')
                out += '\\';
            if (ch == '\n') {
                out += "\\n";
                continue;
            }
            out += ch;
        }
        return out;
    };
    std::string j = "{\n";
    j += "  \"version\": \"" + esc(m.version) + "\",\n";
    j += "  \"grid_hash\": \"" + m.grid_hash + "\",\n";
    j += "  \"started_at\": \"" + m.started_at + "\",\n";
    j += "  \"finished_at\": \"" + m.finished_at + "\",\n";
    j += "  \"status\": \"" + esc(m.status) + "\",\n";
    j += "  \"flags\": [";
    for (std::size_t i = 0; i < m.flags.size(); ++i)
        j += (i ? ", " : "") + ("\"" + esc(m.flags[i]) + "\"");
    j += "],\n";
    j += "  \"config\": \"" + esc(m.config_echo) + "\",\n";
    j += "  \"files\": [\n";
    for (std::size_t i = 0; i < m.files.size(); ++i) {
        j += "    {\"name\": \"" + esc(m.files[i].name) + "\", \"bytes\": " +
             std::to_string(m.files[i].bytes) + ", \"fnv1a64\": \"" + m.files[i].fnv1a64_hex + "\"}";
        j += (i + 1 < m.files.size()) ? ",\n" : "\n";
    }
    j += "  ]\n}\n";
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("io: cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw ConfigError("io: short write: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("io: cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hash_hex_of_file(const std::filesystem::path& path) {
    const std::uint64_t h = fnv1a64(read_text_file(path));
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string grid_hash(const Grid& g) {
    std::string text;
    for (double x : g.x) {
        text += fmt17(x);
        text += '\n';
    }
    const std::uint64_t h = fnv1a64(text);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace warped
