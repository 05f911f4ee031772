// cfmimo: command-line front end for the CSI acquisition simulator.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cfmimo/harness.hpp"
#include "cfmimo/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cfmimo::ConfigError("invalid axis value '" + item + "'");
        }
    }
    if (values.empty())
        throw cfmimo::ConfigError("--values is empty");
    return values;
}

void emit_csv(const std::vector<cfmimo::SweepRow>& rows, const std::string& out_path)
{
    if (out_path.empty() || out_path == "-") {
        cfmimo::write_csv(std::cout, rows);
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw std::runtime_error("cannot open " + out_path + " for writing");
    cfmimo::write_csv(out, rows);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cell-free massive MIMO CSI acquisition with few-bit fronthaul quantization"};
    app.require_subcommand(1);

    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads for large-scale realizations (0 = all cores)");

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* run = app.add_subcommand("run", "Simulate one parameter point and write CSV");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("--seed", seed, "Override master_seed")->each([&](const std::string&) { seed_given = true; });
    run->add_option("--out", out_path, "Output CSV path (default stdout)");

    std::string axis_text;
    std::string values_text;
    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write CSV");
    sweep->add_option("--config", config_path, "JSON experiment config")->required();
    sweep->add_option("--axis", axis_text, "tx_power | sigma_delta | antennas_per_ap")->required();
    sweep->add_option("--values", values_text, "Comma-separated axis values")->required();
    sweep->add_option("--out", out_path, "Output CSV path")->required();
    sweep->add_option("--seed", seed, "Override master_seed")->each([&](const std::string&) { seed_given = true; });

    std::string scheme_text = "VQ_QE";
    int ap = 0;
    int realization = 0;
    auto* train = app.add_subcommand("train-codebook", "Train one AP's vector quantizer codebook and save it");
    train->add_option("--config", config_path, "JSON experiment config")->required();
    train->add_option("--out", out_path, "Codebook file")->required();
    train->add_option("--scheme", scheme_text, "VQ_QE or VQ_EQ");
    train->add_option("--ap", ap, "AP index");
    train->add_option("--realization", realization, "Large-scale realization index");

    auto* validate = app.add_subcommand("validate", "Run the closed-form oracle checks");

    CLI11_PARSE(app, argc, argv);

    cfmimo::RunOptions options;
    options.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;

    try {
        if (*validate) {
            const auto checks = cfmimo::validate();
            cfmimo::write_validation_report(std::cout, checks);
            for (const auto& c : checks)
                if (!c.passed)
                    return kExitValidation;
            return kExitOk;
        }

        cfmimo::ExperimentConfig config = cfmimo::load_config(config_path);
        if (seed_given)
            config.master_seed = seed;

        if (*run) {
            const auto result = cfmimo::run_experiment(config, options);
            emit_csv(cfmimo::rows_for(result, cfmimo::SweepAxis::TxPower, config.tx_power), out_path);
        } else if (*sweep) {
            const auto axis = cfmimo::parse_axis(axis_text);
            if (!axis)
                throw cfmimo::ConfigError("unknown axis '" + axis_text + "'");
            const auto result = cfmimo::sweep(config, *axis, parse_values(values_text), options);
            emit_csv(result.rows, out_path);
        } else if (*train) {
            const auto scheme = cfmimo::parse_scheme(scheme_text);
            if (!scheme || (*scheme != cfmimo::Scheme::VqQe && *scheme != cfmimo::Scheme::VqEq))
                throw cfmimo::ConfigError("--scheme must be VQ_QE or VQ_EQ");
            config.schemes = {*scheme};
            cfmimo::validate_config(config);
            if (ap < 0 || ap >= config.n_aps())
                throw cfmimo::ConfigError("--ap out of range");
            if (realization < 0)
                throw cfmimo::ConfigError("--realization must be >= 0");
            const auto ctx = cfmimo::build_context(config, cfmimo::realization_seed(config.master_seed, realization));
            const auto& q = *scheme == cfmimo::Scheme::VqQe ? ctx.vq_qe : ctx.vq_eq;
            const auto& cb = q.at(static_cast<std::size_t>(ap)).codebook();
            cfmimo::save_codebook(out_path, cb);
            std::cerr << "codebook: dim " << cb.dim() << ", size " << cb.size() << ", "
                      << cb.meta().n_training_samples << " training vectors, distortion "
                      << cb.meta().final_distortion << '\n';
        }
    } catch (const cfmimo::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cfmimo::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
