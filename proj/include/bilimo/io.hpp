#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilimo/combiner.hpp"
#include "bilimo/dictionary.hpp"
#include "bilimo/model.hpp"

namespace bilimo {

inline constexpr const char* library_version = "0.1.0";
// Conventions baked into every export so stale files are rejected.
inline constexpr const char* convention_tag = "unitary-dft;grid=l1*MN+l2;c=tone-major";

// JSON radar config. Keys: M, N, bandwidth_hz, pri_s, carrier_hz, eta,
// sigma_alpha2, sigma_n2, array ("ula" | "random" | "explicit"),
// rx_positions, tx_positions, tone_offsets_hz (required for "explicit").
RadarConfig load_config(const std::string& path, std::uint64_t seed);
RadarConfig config_from_json_text(const std::string& text, std::uint64_t seed);
std::string config_to_json_text(const RadarConfig& cfg);
void save_config(const RadarConfig& cfg, const std::string& path);

// The full-scale experimental configuration: M = 8, N = 12, L = 9, random array.
RadarConfig default_config(std::uint64_t seed);

// FNV-1a over the canonical JSON form.
std::uint64_t config_hash(const RadarConfig& cfg);
std::string hex64(std::uint64_t v);

// Binary bundle: "BLMO", uint32 header length, JSON header, raw column-major
// complex<double> arrays described in the header.
struct NamedArray {
    std::string name;
    Eigen::MatrixXcd data;
};
void write_bundle(const std::string& path, const std::string& kind, const std::string& meta_json,
                  const std::vector<NamedArray>& arrays);
struct Bundle {
    std::string kind;
    std::string meta_json;
    std::vector<NamedArray> arrays;
    const Eigen::MatrixXcd& get(const std::string& name) const;
};
Bundle read_bundle(const std::string& path);

void export_design(const std::string& path, const AcquisitionDesign& design, const RadarConfig& cfg,
                   std::uint64_t seed);
struct DesignBundle {
    Eigen::MatrixXcd Bbar;
    Eigen::MatrixXcd D;
    double support = 0.0;
    int levels = 0;
    int channels = 0;
    int tones = 0;
    double eta = 0.0;
    double emse = 0.0;
    double lmmse = 0.0;
    std::string config_hash;
};
DesignBundle import_design(const std::string& path);

void export_dictionary(const std::string& path, const SteeringDictionary& dict, std::uint64_t seed);
// Rebuilds the dictionary from the stored config and checks the stored steering blocks.
SteeringDictionary import_dictionary(const std::string& path);

// CSV with columns p, n, frequency_Hz, re, im.
void write_filter_csv(const std::string& path, const std::vector<FilterSample>& samples);

}  // namespace bilimo
