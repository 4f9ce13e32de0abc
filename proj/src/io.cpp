#include "bilimo/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bilimo {

using nlohmann::json;

namespace {

json config_json(const RadarConfig& cfg) {
    return json{{"M", cfg.M},
                {"N", cfg.N},
                {"L", cfg.L},
                {"bandwidth_hz", cfg.bandwidth_hz},
                {"pri_s", cfg.pri_s},
                {"carrier_hz", cfg.carrier_hz},
                {"eta", cfg.eta},
                {"sigma_alpha2", cfg.sigma_alpha2},
                {"sigma_n2", cfg.sigma_n2},
                {"array", "explicit"},
                {"rx_positions", cfg.rx_positions},
                {"tx_positions", cfg.tx_positions},
                {"tone_offsets_hz", cfg.tone_offsets_hz}};
}

RadarConfig config_from(const json& j, std::uint64_t seed) {
    const int M = j.at("M").get<int>();
    const int N = j.at("N").get<int>();
    const double B = j.value("bandwidth_hz", 1e6);
    const double T0 = j.value("pri_s", 9e-6);
    const double fc = j.value("carrier_hz", 10e9);
    const double eta = j.value("eta", 2.0);
    const double sa = j.value("sigma_alpha2", 1.0);
    const double sn = j.value("sigma_n2", 0.0);
    const std::string array = j.value("array", "ula");

    RadarConfig cfg;
    if (array == "ula") {
        cfg = make_ula_config(M, N, B, T0, fc, eta, sa, sn);
    } else if (array == "random") {
        Rng rng(mix_seed(seed, 0x61727261ULL));
        cfg = make_random_array_config(rng, M, N, B, T0, fc, eta, sa, sn);
    } else if (array == "explicit") {
        cfg = make_ula_config(M, N, B, T0, fc, eta, sa, sn);
        cfg.rx_positions = j.at("rx_positions").get<std::vector<double>>();
        cfg.tx_positions = j.at("tx_positions").get<std::vector<double>>();
        cfg.tone_offsets_hz = j.at("tone_offsets_hz").get<std::vector<double>>();
    } else {
        throw std::invalid_argument("config: unknown array kind '" + array + "'");
    }
    if (j.contains("L") && j.at("L").get<int>() != cfg.L)
        throw std::invalid_argument("config: L disagrees with round(bandwidth_hz * pri_s)");
    cfg.validate();
    return cfg;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr char magic[4] = {'B', 'L', 'M', 'O'};

}  // namespace

RadarConfig config_from_json_text(const std::string& text, std::uint64_t seed) {
    return config_from(json::parse(text), seed);
}

RadarConfig load_config(const std::string& path, std::uint64_t seed) {
    try {
        return config_from_json_text(read_text(path), seed);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
}

std::string config_to_json_text(const RadarConfig& cfg) { return config_json(cfg).dump(2); }

void save_config(const RadarConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << config_to_json_text(cfg) << "\n";
}

RadarConfig default_config(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x61727261ULL));
    return make_random_array_config(rng, 8, 12, 1e6, 9e-6, 10e9, 2.0, 1.0, 0.0);
}

std::uint64_t config_hash(const RadarConfig& cfg) {
    const std::string s = config_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_bundle(const std::string& path, const std::string& kind, const std::string& meta_json,
                  const std::vector<NamedArray>& arrays) {
    json header{{"kind", kind}, {"convention", convention_tag}, {"version", library_version},
                {"meta", json::parse(meta_json)}};
    std::uint64_t offset = 0;
    for (const auto& a : arrays) {
        header["arrays"].push_back(
            {{"name", a.name}, {"rows", a.data.rows()}, {"cols", a.data.cols()}, {"offset", offset}});
        offset += std::uint64_t(a.data.size()) * sizeof(cplx);
    }
    const std::string h = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::uint32_t len = static_cast<std::uint32_t>(h.size());
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(h.data(), std::streamsize(h.size()));
    for (const auto& a : arrays)
        out.write(reinterpret_cast<const char*>(a.data.data()), std::streamsize(a.data.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("short write on " + path);
}

Bundle read_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char m[4];
    std::uint32_t len = 0;
    in.read(m, 4);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || std::memcmp(m, magic, 4) != 0) throw std::runtime_error(path + ": not a bundle file");
    std::string h(len, '\0');
    in.read(h.data(), len);
    const json header = json::parse(h);
    if (header.at("convention").get<std::string>() != convention_tag)
        throw std::runtime_error(path + ": convention tag mismatch");

    Bundle b;
    b.kind = header.at("kind").get<std::string>();
    b.meta_json = header.at("meta").dump();
    const auto data_start = in.tellg();
    if (header.contains("arrays"))
        for (const auto& a : header.at("arrays")) {
            NamedArray na;
            na.name = a.at("name").get<std::string>();
            na.data.resize(a.at("rows").get<Eigen::Index>(), a.at("cols").get<Eigen::Index>());
            in.seekg(data_start + std::streamoff(a.at("offset").get<std::uint64_t>()));
            in.read(reinterpret_cast<char*>(na.data.data()), std::streamsize(na.data.size() * sizeof(cplx)));
            if (!in) throw std::runtime_error(path + ": truncated array " + na.name);
            b.arrays.push_back(std::move(na));
        }
    return b;
}

const Eigen::MatrixXcd& Bundle::get(const std::string& name) const {
    for (const auto& a : arrays)
        if (a.name == name) return a.data;
    throw std::out_of_range("bundle has no array " + name);
}

void export_design(const std::string& path, const AcquisitionDesign& design, const RadarConfig& cfg,
                   std::uint64_t seed) {
    json meta{{"support", design.support}, {"levels", design.levels},  {"channels", design.channels},
              {"tones", design.tones},     {"eta", design.eta},         {"emse", design.emse},
              {"lmmse", design.lmmse},     {"seed", seed},              {"config_hash", hex64(config_hash(cfg))},
              {"config", config_json(cfg)}};
    write_bundle(path, "design", meta.dump(), {{"Bbar", design.combiner_dense()}, {"D", design.D}});
}

DesignBundle import_design(const std::string& path) {
    const Bundle b = read_bundle(path);
    if (b.kind != "design") throw std::runtime_error(path + ": not a design bundle");
    const json meta = json::parse(b.meta_json);
    DesignBundle d;
    d.Bbar = b.get("Bbar");
    d.D = b.get("D");
    d.support = meta.at("support").get<double>();
    d.levels = meta.at("levels").get<int>();
    d.channels = meta.at("channels").get<int>();
    d.tones = meta.at("tones").get<int>();
    d.eta = meta.at("eta").get<double>();
    d.emse = meta.at("emse").get<double>();
    d.lmmse = meta.at("lmmse").get<double>();
    d.config_hash = meta.at("config_hash").get<std::string>();
    return d;
}

void export_dictionary(const std::string& path, const SteeringDictionary& dict, std::uint64_t seed) {
    const RadarConfig& cfg = dict.config();
    json meta{{"M", cfg.M},
              {"N", cfg.N},
              {"L", cfg.L},
              {"rows", dict.rows()},
              {"cols", dict.cols()},
              {"seed", seed},
              {"config_hash", hex64(config_hash(cfg))},
              {"config", config_json(cfg)}};
    std::vector<NamedArray> arrays;
    for (int m = 0; m < cfg.M; ++m) {
        arrays.push_back({"U" + std::to_string(m), dict.U()[m]});
        arrays.push_back({"V" + std::to_string(m), dict.V()[m]});
    }
    write_bundle(path, "dictionary", meta.dump(), arrays);
}

SteeringDictionary import_dictionary(const std::string& path) {
    const Bundle b = read_bundle(path);
    if (b.kind != "dictionary") throw std::runtime_error(path + ": not a dictionary bundle");
    const json meta = json::parse(b.meta_json);
    const RadarConfig cfg = config_from(meta.at("config"), 0);
    SteeringDictionary dict(cfg);
    for (int m = 0; m < cfg.M; ++m) {
        const double du = (dict.U()[m] - b.get("U" + std::to_string(m))).cwiseAbs().maxCoeff();
        const double dv = (dict.V()[m] - b.get("V" + std::to_string(m))).cwiseAbs().maxCoeff();
        if (du > 1e-12 || dv > 1e-12) throw std::runtime_error(path + ": stored steering blocks do not match config");
    }
    return dict;
}

void write_filter_csv(const std::string& path, const std::vector<FilterSample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "p,n,frequency_Hz,re,im\n";
    char buf[160];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.17g,%.17g\n", s.p, s.n, s.frequency_hz, s.gain.real(),
                      s.gain.imag());
        out << buf;
    }
}

}  // namespace bilimo
