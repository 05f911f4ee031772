#include "cfmimo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace cfmimo {

int ExperimentConfig::bits_per_vector() const
{
    return static_cast<int>(std::lround(bits_per_dim * antennas_per_ap));
}

bool ExperimentConfig::has_scheme(Scheme s) const
{
    return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

std::vector<std::string> validation_errors(const ExperimentConfig& c)
{
    std::vector<std::string> errs;
    auto need = [&errs](bool ok, const std::string& msg) {
        if (!ok)
            errs.push_back(msg);
    };

    need(c.antennas_per_ap >= 1, "antennas_per_ap must be >= 1");
    need(c.total_antennas >= 1, "total_antennas must be >= 1");
    if (c.antennas_per_ap >= 1)
        need(c.total_antennas % c.antennas_per_ap == 0, "total_antennas must be a multiple of antennas_per_ap");
    need(c.users >= 1, "users must be >= 1");
    need(c.tau >= c.users, "tau must be >= users (orthogonal pilots)");
    need(c.trials >= 1, "trials must be >= 1");
    need(c.large_scale_realizations >= 1, "large_scale_realizations must be >= 1");

    const double bn = c.bits_per_dim * c.antennas_per_ap;
    const bool integral = std::abs(bn - std::round(bn)) < 1e-9;
    need(integral && bn >= 1.0 - 1e-9, "bits_per_dim * antennas_per_ap must be an integer >= 1");
    need(!integral || bn <= 24.0, "bits_per_dim * antennas_per_ap must not exceed 24");
    if (c.has_scheme(Scheme::SqEq) || c.has_scheme(Scheme::SqQe))
        need(c.bits_per_dim >= 1.0 && std::abs(c.bits_per_dim - std::round(c.bits_per_dim)) < 1e-9,
             "scalar quantization baselines need an integer bits_per_dim >= 1");

    if (integral && bn >= 1.0 && bn <= 24.0) {
        const long long s = 1LL << c.bits_per_vector();
        if (c.has_scheme(Scheme::VqEq))
            need(s <= 2LL * c.n_training * c.users, "codebook size exceeds the EQ training sample count");
        if (c.has_scheme(Scheme::VqQe))
            need(s <= 2LL * c.n_training * c.tau, "codebook size exceeds the QE training sample count");
    }

    need(c.sigma_delta_deg >= 0.0, "sigma_delta_deg must be >= 0");
    need(c.antenna_spacing > 0.0, "antenna_spacing must be > 0");
    need(c.bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
    need(c.noise_temp_k > 0.0, "noise_temp_k must be > 0");
    need(c.sigma_sh_db >= 0.0, "sigma_sh_db must be >= 0");
    need(c.area_side_km > 0.0, "area_side_km must be > 0");
    need(c.d0_km > 0.0 && c.d1_km > c.d0_km, "path loss breakpoints must satisfy 0 < d0_km < d1_km");
    need(c.carrier_freq_mhz > 0.0 && c.h_ap_m > 0.0 && c.h_ue_m > 0.0,
         "carrier_freq_mhz, h_ap_m and h_ue_m must be > 0");
    need(c.n_training >= 1, "n_training must be >= 1");
    need(c.bussgang_nt >= 0, "bussgang_nt must be >= 0");
    need(c.sq_loading_factor >= 0.0, "sq_loading_factor must be >= 0");
    need(c.lbg_split_epsilon > 0.0, "lbg_split_epsilon must be > 0");
    need(c.lbg_rel_tol >= 0.0, "lbg_rel_tol must be >= 0");
    need(c.lbg_max_iters >= 1, "lbg_max_iters must be >= 1");

    need(!c.schemes.empty(), "schemes must not be empty");
    std::set<Scheme> seen(c.schemes.begin(), c.schemes.end());
    need(seen.size() == c.schemes.size(), "schemes must not repeat");
    return errs;
}

void validate_config(const ExperimentConfig& config)
{
    const auto errs = validation_errors(config);
    if (errs.empty())
        return;
    std::string msg = "invalid configuration:";
    for (const auto& e : errs)
        msg += "\n  - " + e;
    throw ConfigError(msg);
}

namespace {

std::string_view distribution_name(AngularDistribution d)
{
    return d == AngularDistribution::Gaussian ? "gaussian" : "uniform";
}

std::string_view power_unit_name(PowerUnit u)
{
    return u == PowerUnit::dBW ? "dBW" : "dBm";
}

std::string_view pilot_kind_name(PilotKind p)
{
    return p == PilotKind::Random ? "random" : "dft";
}

} // namespace

nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["total_antennas"] = c.total_antennas;
    j["antennas_per_ap"] = c.antennas_per_ap;
    j["users"] = c.users;
    j["tau"] = c.tau;
    j["bits_per_dim"] = c.bits_per_dim;
    j["sigma_delta_deg"] = c.sigma_delta_deg;
    j["angular_distribution"] = distribution_name(c.angular_distribution);
    j["antenna_spacing"] = c.antenna_spacing;
    j["tx_power"] = c.tx_power;
    j["power_unit"] = power_unit_name(c.power_unit);
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["noise_figure_db"] = c.noise_figure_db;
    j["noise_temp_k"] = c.noise_temp_k;
    j["sigma_sh_db"] = c.sigma_sh_db;
    j["shadow_inside_d1"] = c.shadow_inside_d1;
    j["area_side_km"] = c.area_side_km;
    j["wrap_around"] = c.wrap_around;
    j["d0_km"] = c.d0_km;
    j["d1_km"] = c.d1_km;
    j["carrier_freq_mhz"] = c.carrier_freq_mhz;
    j["h_ap_m"] = c.h_ap_m;
    j["h_ue_m"] = c.h_ue_m;
    j["n_training"] = c.n_training;
    j["bussgang_nt"] = c.bussgang_nt;
    j["trials"] = c.trials;
    j["large_scale_realizations"] = c.large_scale_realizations;
    j["master_seed"] = c.master_seed;
    auto schemes = nlohmann::json::array();
    for (Scheme s : c.schemes)
        schemes.push_back(scheme_name(s));
    j["schemes"] = schemes;
    j["pilot_kind"] = pilot_kind_name(c.pilot_kind);
    j["sq_loading_factor"] = c.sq_loading_factor;
    j["lbg_split_epsilon"] = c.lbg_split_epsilon;
    j["lbg_rel_tol"] = c.lbg_rel_tol;
    j["lbg_max_iters"] = c.lbg_max_iters;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    ExperimentConfig c;
    const nlohmann::json known = to_json(c);
    std::vector<std::string> unknown;
    for (const auto& item : j.items())
        if (!known.contains(item.key()))
            unknown.push_back(item.key());
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown)
            msg += " " + k;
        throw ConfigError(msg);
    }

    auto read = [&j](const char* key, auto& field) {
        if (!j.contains(key))
            return;
        try {
            j.at(key).get_to(field);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config key ") + key + ": " + e.what());
        }
    };
    auto read_enum = [&j](const char* key, auto& field, auto parse) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_string())
            throw ConfigError(std::string("config key ") + key + " must be a string");
        field = parse(j.at(key).get<std::string>());
    };

    read("total_antennas", c.total_antennas);
    read("antennas_per_ap", c.antennas_per_ap);
    read("users", c.users);
    read("tau", c.tau);
    read("bits_per_dim", c.bits_per_dim);
    read("sigma_delta_deg", c.sigma_delta_deg);
    read_enum("angular_distribution", c.angular_distribution, [](const std::string& s) {
        if (s == "gaussian")
            return AngularDistribution::Gaussian;
        if (s == "uniform")
            return AngularDistribution::Uniform;
        throw ConfigError("angular_distribution must be gaussian or uniform");
    });
    read("antenna_spacing", c.antenna_spacing);
    read("tx_power", c.tx_power);
    read_enum("power_unit", c.power_unit, [](const std::string& s) {
        if (s == "dBW")
            return PowerUnit::dBW;
        if (s == "dBm")
            return PowerUnit::dBm;
        throw ConfigError("power_unit must be dBW or dBm");
    });
    read("bandwidth_hz", c.bandwidth_hz);
    read("noise_figure_db", c.noise_figure_db);
    read("noise_temp_k", c.noise_temp_k);
    read("sigma_sh_db", c.sigma_sh_db);
    read("shadow_inside_d1", c.shadow_inside_d1);
    read("area_side_km", c.area_side_km);
    read("wrap_around", c.wrap_around);
    read("d0_km", c.d0_km);
    read("d1_km", c.d1_km);
    read("carrier_freq_mhz", c.carrier_freq_mhz);
    read("h_ap_m", c.h_ap_m);
    read("h_ue_m", c.h_ue_m);
    read("n_training", c.n_training);
    read("bussgang_nt", c.bussgang_nt);
    read("trials", c.trials);
    read("large_scale_realizations", c.large_scale_realizations);
    read("master_seed", c.master_seed);
    if (j.contains("schemes")) {
        if (!j.at("schemes").is_array())
            throw ConfigError("schemes must be an array of scheme names");
        c.schemes.clear();
        for (const auto& s : j.at("schemes")) {
            const auto parsed = s.is_string() ? parse_scheme(s.get<std::string>()) : std::nullopt;
            if (!parsed)
                throw ConfigError("unknown scheme " + s.dump());
            c.schemes.push_back(*parsed);
        }
    }
    read_enum("pilot_kind", c.pilot_kind, [](const std::string& s) {
        if (s == "random")
            return PilotKind::Random;
        if (s == "dft")
            return PilotKind::Dft;
        throw ConfigError("pilot_kind must be random or dft");
    });
    read("sq_loading_factor", c.sq_loading_factor);
    read("lbg_split_epsilon", c.lbg_split_epsilon);
    read("lbg_rel_tol", c.lbg_rel_tol);
    read("lbg_max_iters", c.lbg_max_iters);
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_digest(const ExperimentConfig& config)
{
    const std::string text = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cfmimo
