#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "warped/diagnostics.hpp"
#include "warped/flow.hpp"
#include "warped/geometry.hpp"
#include "warped/profile.hpp"

namespace warped {

// Locale-independent decimal text with 17 significant digits, so doubles
// round-trip bit-exactly.
std::string fmt17(double v);
std::string fmt_short(double v); // %.9g, used in file names

// Profile CSV: header "x,phi,psi", one node per row, ascending x.
std::string profile_to_csv(const Profile& p);
Profile parse_profile_csv(const std::string& text, int n = 2);
void write_profile_csv(const Profile& p, const std::filesystem::path& path);
Profile load_profile_csv(const std::filesystem::path& path, int n = 2);

// CurvatureField CSV: header "x,s,psi_s,psi_ss,K0,K1,R,H,V".
std::string field_to_csv(const Profile& p, const CurvatureField& f);

// Flat key = value configuration text; '#' starts a comment; unknown keys
// are rejected.
FlowConfig parse_config(const std::string& text);
FlowConfig load_config_file(const std::filesystem::path& path);
std::string config_to_text(const FlowConfig& c); // normalized echo

const char* outer_bc_name(OuterBc bc);
const char* scalar_bound_variant_name(ScalarBoundVariant v);

// series.csv: one row per recorded state, mass columns appended for n = 2.
std::string series_csv(const TrajectoryDiagnostics& diag);
// mass_series.csv: t plus one column per probe radius.
std::string mass_series_csv(const MassProbeSeries& mass);
// diagnostics.json: array of per-state reports {t, checks:[...]};
// trajectory-level checks are appended to the final entry.
std::string diagnostics_json(const TrajectoryDiagnostics& diag);

struct ManifestFile {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64_hex;
};

struct RunManifest {
    std::string config_echo;
    std::string version;
    std::string grid_hash;
    std::string started_at;  // ISO-8601 UTC wall time
    std::string finished_at;
    std::string status;      // completed | blew_up | failed
    std::vector<std::string> flags;
    std::vector<ManifestFile> files;
};

std::string manifest_to_json(const RunManifest& m);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
std::string hash_hex_of_file(const std::filesystem::path& path);
std::string grid_hash(const Grid& g);
std::string iso8601_now();

} // namespace warped
