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

/**
 * @file commands.hpp
 * Implementations of the eprsteer subcommands. Each returns a process exit
 * code and writes human-facing text to the given streams.
 *
 * Exit codes:
 *   0   success (certify: two-way steering)
 *   1   unexpected internal error
 *   2   bad input: parameter/targets/dataset file or argument value
 *   3   output file not writable
 *   4   fit failed (residual above limit)
 *   5   numerical failure on valid input (e.g. degenerate data)
 *   10  certify: one-way steering A -> B
 *   11  certify: one-way steering B -> A
 *   12  certify: no steering
 *
 * Every output file FILE is written atomically and accompanied by
 * FILE.manifest.json (command, parameters, seed, version, outputs).
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <eprsteer/eprsteer.hpp>

namespace eprsteer::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kOutput = 3;
inline constexpr int kFitFailed = 4;
inline constexpr int kNumerical = 5;
inline constexpr int kTwoWay = 0;
inline constexpr int kOneWayAtoB = 10;
inline constexpr int kOneWayBtoA = 11;
inline constexpr int kNoSteering = 12;
} // namespace exit_code

using Json = nlohmann::ordered_json;

struct Streams {
    std::ostream &out;
    std::ostream &err;
};

inline Json params_json(const SetupParams &p) {
    Json j;
    j["squeezing_db"] = p.squeezer.squeezing_dB;
    j["antisqueezing_db"] = p.squeezer.antisqueezing_dB;
    j["eta_a"] = p.eta_A;
    j["eta_b"] = p.eta_B;
    j["eta_c"] = p.eta_C;
    j["vacuum_fraction"] = p.vacuum_fraction;
    return j;
}

/// Writes FILE.manifest.json describing a run that produced `outputs`.
inline void write_manifest(const std::filesystem::path &primary, const std::string &command,
                           Json parameters, std::optional<std::uint64_t> seed,
                           const std::vector<std::filesystem::path> &outputs) {
    Json j;
    j["command"] = command;
    j["parameters"] = std::move(parameters);
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    j["version"] = kVersion;
    Json files = Json::array();
    for (const auto &o : outputs) {
        files.push_back(o.filename().string());
    }
    j["outputs"] = files;
    auto path = primary;
    path += ".manifest.json";
    io::atomic_write(path, j.dump(2) + "\n");
}

/// Maps library exceptions onto the exit-code table.
inline int guarded(const Streams &io_, const std::function<int()> &body) {
    try {
        return body();
    } catch (const OutputError &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kOutput;
    } catch (const FitFailed &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kFitFailed;
    } catch (const InvalidInput &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kBadInput;
    } catch (const InvalidArgument &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kBadInput;
    } catch (const UnphysicalModel &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kBadInput;
    } catch (const NumericalError &e) {
        io_.err << "error: " << e.what() << '\n';
        return exit_code::kNumerical;
    } catch (const std::exception &e) {
        io_.err << "internal error: " << e.what() << '\n';
        return exit_code::kInternal;
    }
}

inline SetupParams load_params(const std::filesystem::path &file) {
    return parse_params(io::read_file(file));
}

inline SteeringDirection::Kind parse_direction(const std::string &text) {
    if (text == "a-to-b") {
        return SteeringDirection::Kind::AtoB;
    }
    if (text == "b-to-a") {
        return SteeringDirection::Kind::BtoA;
    }
    throw InvalidArgument("direction must be a-to-b or b-to-a");
}

inline void check_unit(double v, const char *name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
    }
}

// ---------------------------------------------------------------------------

struct SweepOptions {
    std::filesystem::path params;
    double v_start = 0.0;
    double v_end = 1.0;
    std::size_t steps = 21;
    std::filesystem::path out;
};

inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::string csv = "v,product_a_to_b,product_b_to_a,class\n";
    for (const auto &r : rows) {
        csv += io::format_number(r.v) + ',' + io::format_number(r.product_AtoB) + ',' +
               io::format_number(r.product_BtoA) + ',' + std::string(to_string(r.state_class)) +
               '\n';
    }
    return csv;
}

inline int cmd_sweep(const SweepOptions &o, const Streams &s) {
    return guarded(s, [&] {
        const SetupParams p = load_params(o.params);
        check_unit(o.v_start, "--v-start");
        check_unit(o.v_end, "--v-end");
        const auto rows = sweep_vacuum(p, linear_grid(o.v_start, o.v_end, o.steps));
        io::atomic_write(o.out, sweep_csv(rows));
        Json args;
        args["params"] = params_json(p);
        args["v_start"] = o.v_start;
        args["v_end"] = o.v_end;
        args["steps"] = o.steps;
        write_manifest(o.out, "sweep", args, std::nullopt, {o.out});
        return exit_code::kOk;
    });
}

// ---------------------------------------------------------------------------

struct CertifyOptions {
    std::filesystem::path params;
    /// Overrides the file's vacuum_fraction when set.
    std::optional<double> v;
};

inline Json criterion_json(const CriterionResult &r) {
    Json j;
    j["cond_var_x"] = r.cond_var_x;
    j["cond_var_p"] = r.cond_var_p;
    j["product"] = r.product;
    j["certified"] = r.certified;
    return j;
}

inline int class_exit_code(StateClass c) {
    switch (c) {
    case StateClass::TwoWay:
        return exit_code::kTwoWay;
    case StateClass::OneWayAtoB:
        return exit_code::kOneWayAtoB;
    case StateClass::OneWayBtoA:
        return exit_code::kOneWayBtoA;
    default:
        return exit_code::kNoSteering;
    }
}

inline int cmd_certify(const CertifyOptions &o, const Streams &s) {
    return guarded(s, [&] {
        SetupParams p = load_params(o.params);
        if (o.v) {
            check_unit(*o.v, "--v");
            p.vacuum_fraction = *o.v;
        }
        const GaussianState state = build_bipartite(p);
        const StateClass c = classify(state);
        Json j;
        j["v"] = p.vacuum_fraction;
        j["a_to_b"] = criterion_json(reid_product(state, SteeringDirection::a_to_b()));
        j["b_to_a"] = criterion_json(reid_product(state, SteeringDirection::b_to_a()));
        j["class"] = to_string(c);
        s.out << j.dump(2) << '\n';
        return class_exit_code(c);
    });
}

// ---------------------------------------------------------------------------

struct SampleOptions {
    std::filesystem::path params;
    std::optional<double> v;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    std::filesystem::path out;
};

inline int cmd_sample(const SampleOptions &o, const Streams &s) {
    return guarded(s, [&] {
        const SetupParams p = load_params(o.params);
        const double v = o.v.value_or(p.vacuum_fraction);
        check_unit(v, "--v");
        const Dataset d = generate_dataset(p, v, o.n, o.seed);
        auto meta = o.out;
        meta += ".meta";
        io::atomic_write(o.out, format_dataset_csv(d));
        io::atomic_write(meta, format_dataset_metadata(d));
        Json args;
        args["params"] = params_json(d.params);
        args["n_per_setting"] = o.n;
        write_manifest(o.out, "sample", args, o.seed, {o.out, meta});
        return exit_code::kOk;
    });
}

// ---------------------------------------------------------------------------

struct BootstrapOptions {
    std::filesystem::path dataset;
    std::string direction = "a-to-b";
    std::size_t resamples = 1000;
    std::size_t resample_size = 100000;
    std::uint64_t seed = 0;
    std::filesystem::path out;
    std::optional<std::filesystem::path> histogram_csv;
};

inline int cmd_bootstrap(const BootstrapOptions &o, const Streams &s) {
    return guarded(s, [&] {
        const auto kind = parse_direction(o.direction);
        const Dataset d = parse_dataset_csv(io::read_file(o.dataset));
        const BootstrapResult r = bootstrap(d, kind, o.resamples, o.resample_size, o.seed);
        io::atomic_write(o.out, to_json(r).dump(2) + "\n");
        std::vector<std::filesystem::path> outputs{o.out};
        if (o.histogram_csv) {
            io::atomic_write(*o.histogram_csv, histogram_csv(r.histogram));
            outputs.push_back(*o.histogram_csv);
        }
        Json args;
        args["dataset"] = o.dataset.filename().string();
        args["direction"] = o.direction;
        args["resamples"] = o.resamples;
        args["resample_size"] = o.resample_size;
        write_manifest(o.out, "bootstrap", args, o.seed, outputs);
        s.out << io::format_number(r.mean) << ' ' << io::format_number(r.std) << ' '
              << io::format_number(r.sigmas_from_one) << '\n';
        return exit_code::kOk;
    });
}

// ---------------------------------------------------------------------------

struct FitOptions {
    std::filesystem::path targets;
    std::filesystem::path out;
};

inline int cmd_fit(const FitOptions &o, const Streams &s) {
    return guarded(s, [&] {
        const FitTargets t = parse_targets(io::read_file(o.targets));
        const FitResult r = fit_params(t);
        const ThresholdReport th = find_thresholds(r.params, 1e-6);
        std::string report = "residual = " + io::format_roundtrip(r.residual) + "\n" +
                             "v = " + io::format_roundtrip(t.v) + "\n" +
                             "product_a_to_b = " + io::format_roundtrip(r.product_AtoB) + "\n" +
                             "product_b_to_a = " + io::format_roundtrip(r.product_BtoA) + "\n";
        const auto opt = [](const std::optional<double> &x) {
            return x ? io::format_roundtrip(*x) : std::string("none");
        };
        report += "v_b_to_a_lost = " + opt(th.v_BtoA_lost) + "\n";
        report += "v_a_to_b_lost = " + opt(th.v_AtoB_lost) + "\n";
        auto report_path = o.out;
        report_path += ".report";
        io::atomic_write(o.out, format_params(r.params));
        io::atomic_write(report_path, report);
        Json args;
        args["product_a_to_b"] = t.product_AtoB;
        args["product_b_to_a"] = t.product_BtoA;
        args["v_b_to_a_lost"] = t.v_BtoA_lost ? Json(*t.v_BtoA_lost) : Json(nullptr);
        args["squeezing_db"] = t.squeezing_dB;
        args["v"] = t.v;
        write_manifest(o.out, "fit", args, std::nullopt, {o.out, report_path});
        s.out << report;
        return exit_code::kOk;
    });
}

// ---------------------------------------------------------------------------

/// 1-sigma contour of a single-mode Gaussian: semi-axes and major-axis angle in [0, pi).
struct Ellipse {
    double center_x = 0.0;
    double center_p = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle = 0.0;
};

inline Ellipse ellipse_of(const GaussianState &single_mode) {
    if (single_mode.n_modes() != 1) {
        throw InvalidArgument("ellipse_of: single-mode state required");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Eigen::Matrix2d(single_mode.cov()));
    const auto &ev = es.eigenvalues(); // ascending
    Ellipse e;
    e.center_x = single_mode.mean()(0);
    e.center_p = single_mode.mean()(1);
    e.semi_major = std::sqrt(std::max(0.0, ev(1)));
    e.semi_minor = std::sqrt(std::max(0.0, ev(0)));
    if (ev(1) - ev(0) > 1e-12 * std::max(1.0, ev(1))) {
        const Eigen::Vector2d major = es.eigenvectors().col(1);
        double angle = std::atan2(major(1), major(0));
        if (angle < 0.0) {
            angle += std::numbers::pi;
        }
        if (angle >= std::numbers::pi) {
            angle -= std::numbers::pi;
        }
        e.angle = angle;
    }
    return e;
}

struct EllipsesOptions {
    std::filesystem::path params;
    std::optional<double> v;
    std::string measured = "A-X";
    double outcome = 0.0;
    std::filesystem::path out;
};

inline std::string ellipses_csv(const Ellipse &marginal_e, const Ellipse &conditional_e) {
    std::string csv = "kind,center_x,center_p,semi_major,semi_minor,angle\n";
    const auto row = [&csv](const char *kind, const Ellipse &e) {
        csv += std::string(kind) + ',' + io::format_number(e.center_x) + ',' +
               io::format_number(e.center_p) + ',' + io::format_number(e.semi_major) + ',' +
               io::format_number(e.semi_minor) + ',' + io::format_number(e.angle) + '\n';
    };
    row("marginal", marginal_e);
    row("conditional", conditional_e);
    return csv;
}

inline int cmd_ellipses(const EllipsesOptions &o, const Streams &s) {
    return guarded(s, [&] {
        SetupParams p = load_params(o.params);
        if (o.v) {
            check_unit(*o.v, "--v");
            p.vacuum_fraction = *o.v;
        }
        std::size_t measured_mode = 0;
        double theta = 0.0;
        if (o.measured == "A-X" || o.measured == "A-P") {
            measured_mode = 0;
        } else if (o.measured == "B-X" || o.measured == "B-P") {
            measured_mode = 1;
        } else {
            throw InvalidArgument("--measured must be one of A-X, A-P, B-X, B-P");
        }
        if (o.measured.back() == 'P') {
            theta = std::numbers::pi / 2.0;
        }
        const GaussianState state = build_bipartite(p);
        const std::size_t other = 1 - measured_mode;
        const Ellipse before = ellipse_of(marginal(state, {other}));
        const Ellipse after = ellipse_of(condition_on_homodyne(state, measured_mode, theta, o.outcome));
        io::atomic_write(o.out, ellipses_csv(before, after));
        Json args;
        args["params"] = params_json(p);
        args["measured"] = o.measured;
        args["outcome"] = o.outcome;
        write_manifest(o.out, "ellipses", args, std::nullopt, {o.out});
        return exit_code::kOk;
    });
}

} // namespace eprsteer::cli
