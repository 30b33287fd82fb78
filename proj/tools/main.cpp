// Copyright 2026 The eprsteer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = eprsteer::cli;

int main(int argc, char **argv) {
    CLI::App app{"eprsteer: Gaussian one-way EPR steering simulator and certification tool"};
    app.set_version_flag("--version", std::string(eprsteer::kVersion));
    app.require_subcommand(1);

    cli::SweepOptions sweep;
    auto *sweep_cmd = app.add_subcommand("sweep", "Reid products versus vacuum contribution (CSV)");
    sweep_cmd->add_option("--params", sweep.params, "Parameter file")->required();
    sweep_cmd->add_option("--v-start", sweep.v_start, "First vacuum fraction");
    sweep_cmd->add_option("--v-end", sweep.v_end, "Last vacuum fraction");
    sweep_cmd->add_option("--steps", sweep.steps, "Number of grid points")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep.out, "Output CSV")->required();

    cli::CertifyOptions certify;
    double certify_v = 0.0;
    auto *certify_cmd = app.add_subcommand("certify", "Evaluate both steering criteria (JSON on stdout)");
    certify_cmd->add_option("--params", certify.params, "Parameter file")->required();
    auto *certify_v_opt = certify_cmd->add_option("--v", certify_v, "Vacuum fraction (overrides file)");

    cli::SampleOptions sample;
    double sample_v = 0.0;
    auto *sample_cmd = app.add_subcommand("sample", "Synthetic homodyne dataset (CSV + sidecar)");
    sample_cmd->add_option("--params", sample.params, "Parameter file")->required();
    auto *sample_v_opt = sample_cmd->add_option("--v", sample_v, "Vacuum fraction (overrides file)");
    sample_cmd->add_option("--n", sample.n, "Pairs per setting")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    sample_cmd->add_option("--seed", sample.seed, "RNG seed");
    sample_cmd->add_option("--out", sample.out, "Output CSV")->required();

    cli::BootstrapOptions boot;
    std::string histogram;
    auto *boot_cmd = app.add_subcommand("bootstrap", "Bootstrap a conditional-variance product (JSON)");
    boot_cmd->add_option("--dataset", boot.dataset, "Dataset CSV")->required();
    boot_cmd->add_option("--direction", boot.direction, "a-to-b or b-to-a");
    boot_cmd->add_option("--resamples", boot.resamples, "Number of resamples");
    boot_cmd->add_option("--resample-size", boot.resample_size, "Pairs per resample and setting");
    boot_cmd->add_option("--seed", boot.seed, "RNG seed");
    boot_cmd->add_option("--out", boot.out, "Output JSON")->required();
    auto *hist_opt = boot_cmd->add_option("--histogram-csv", histogram, "Also write the histogram as CSV");

    cli::FitOptions fit;
    auto *fit_cmd = app.add_subcommand("fit", "Fit source/efficiency parameters to target products");
    fit_cmd->add_option("--targets", fit.targets, "Targets file")->required();
    fit_cmd->add_option("--out", fit.out, "Output parameter file")->required();

    cli::EllipsesOptions ell;
    double ell_v = 0.0;
    auto *ell_cmd = app.add_subcommand("ellipses", "Marginal and conditional 1-sigma ellipses (CSV)");
    ell_cmd->add_option("--params", ell.params, "Parameter file")->required();
    auto *ell_v_opt = ell_cmd->add_option("--v", ell_v, "Vacuum fraction (overrides file)");
    ell_cmd->add_option("--measured", ell.measured, "A-X, A-P, B-X or B-P");
    ell_cmd->add_option("--outcome", ell.outcome, "Homodyne outcome");
    ell_cmd->add_option("--out", ell.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return cli::exit_code::kBadInput;
    }

    const cli::Streams io{std::cout, std::cerr};
    if (*sweep_cmd) {
        return cli::cmd_sweep(sweep, io);
    }
    if (*certify_cmd) {
        if (*certify_v_opt) {
            certify.v = certify_v;
        }
        return cli::cmd_certify(certify, io);
    }
    if (*sample_cmd) {
        if (*sample_v_opt) {
            sample.v = sample_v;
        }
        return cli::cmd_sample(sample, io);
    }
    if (*boot_cmd) {
        if (*hist_opt) {
            boot.histogram_csv = histogram;
        }
        return cli::cmd_bootstrap(boot, io);
    }
    if (*fit_cmd) {
        return cli::cmd_fit(fit, io);
    }
    if (*ell_cmd) {
        if (*ell_v_opt) {
            ell.v = ell_v;
        }
        return cli::cmd_ellipses(ell, io);
    }
    return cli::exit_code::kBadInput;
}
