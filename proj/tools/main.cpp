// Command line front end: train autoencoder systems, sweep SER curves for
// trained models and classical baselines, shape constellations, and produce
// merged comparison curves.
//
// Exit codes: 0 success, 2 usage error, 3 training divergence, 4 file format
// error. Effective settings are echoed to stderr before any compute so that
// every result file can be traced back to its exact configuration.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "mimoae/ae.hpp"
#include "mimoae/constellation.hpp"
#include "mimoae/errors.hpp"
#include "mimoae/eval.hpp"
#include "mimoae/nn.hpp"
#include "mimoae/rng.hpp"

namespace {

using namespace mimoae;

struct SweepArgs {
    double snr_start = 0.0;
    double snr_stop = 24.0;
    double snr_step = 2.0;
    std::uint64_t min_errors = 100;
    std::uint64_t max_symbols = 10000000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
};

struct TrainArgs {
    std::string system;
    std::size_t m = 0;
    double snr_db = 0.0;
    std::size_t updates = 0;
    std::size_t batch = 2048;
    double lr = 0.001;
    std::uint64_t seed = 1;
    int threads = 1;
    bool parallel_batch = false;
    std::string out;
    std::string loss_out = "loss.csv";
};

struct EvalArgs {
    std::string system;
    std::size_t m = 0;
    std::string model;
    SweepArgs sweep;
};

struct BaselineArgs {
    std::string scheme;
    std::string constellation = "qpsk";
    std::size_t m = 16;
    SweepArgs sweep;
};

struct ShapeArgs {
    std::size_t m = 16;
    double snr_db = 12.0;
    std::size_t updates = 2000;
    std::size_t batch = 2048;
    double lr = 0.001;
    std::uint64_t seed = 1;
    int threads = 1;
    bool parallel_batch = false;
    std::string model;
    std::string out;
};

struct CompareArgs {
    std::string system;
    std::size_t m = 0;
    std::string model;
    std::string scatter_out;
    SweepArgs sweep;
};

void note(const char* key, const std::string& value) {
    std::fprintf(stderr, "# %-12s %s\n", key, value.c_str());
}

std::string str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void note_sweep(const SweepArgs& a) {
    note("snr_start", str(a.snr_start));
    note("snr_stop", str(a.snr_stop));
    note("snr_step", str(a.snr_step));
    note("min_errors", std::to_string(a.min_errors));
    note("max_symbols", std::to_string(a.max_symbols));
    note("seed", std::to_string(a.seed));
    note("threads", std::to_string(a.threads));
    note("out", a.out);
}

std::vector<double> snr_grid(const SweepArgs& a) {
    if (a.snr_step <= 0.0)
        throw InvalidInputError("snr-step must be positive");
    if (a.snr_stop < a.snr_start)
        throw InvalidInputError("snr-stop must not be below snr-start");
    std::vector<double> snrs;
    for (std::size_t i = 0;; ++i) {
        double v = a.snr_start + double(i) * a.snr_step;
        if (v > a.snr_stop + 1e-9) break;
        snrs.push_back(v);
    }
    return snrs;
}

StoppingRule stopping_rule(const SweepArgs& a) {
    StoppingRule rule;
    rule.min_errors = a.min_errors;
    rule.max_symbols = a.max_symbols;
    return rule;
}

/// Catalog name, or a path to a saved constellation file (a shaped
/// constellation slots into any baseline this way).
Constellation resolve_constellation(const std::string& name_or_path) {
    if (name_or_path.find('/') == std::string::npos &&
        name_or_path.find('.') == std::string::npos)
        return Constellation::build(name_or_path);
    return load_constellation(name_or_path);
}

Constellation reference_constellation(std::size_t m) {
    switch (m) {
        case 2: return Constellation::build(ConstellationKind::bpsk);
        case 4: return Constellation::build(ConstellationKind::qpsk);
        case 8: return Constellation::build(ConstellationKind::qam8);
        case 16: return Constellation::build(ConstellationKind::qam16);
        default:
            throw InvalidInputError("no reference constellation for m=" +
                                    std::to_string(m));
    }
}

struct TrainDefaults {
    double snr_db;
    std::size_t updates;
};

TrainDefaults train_defaults(SystemKind kind, std::size_t m) {
    switch (kind) {
        case SystemKind::siso: return {12.0, 2000};
        case SystemKind::open_loop: return {m >= 16 ? 18.0 : 15.0, 1563};
        case SystemKind::closed_loop: return {15.0, 20000};
        case SystemKind::mu_mimo: return {15.0, 3125};
    }
    throw InvalidInputError("unknown system kind");
}

int run_train(const TrainArgs& a) {
    SystemKind kind = system_kind_from_string(a.system);
    note("command", "train");
    note("system", a.system);
    note("m", std::to_string(a.m));
    note("snr_db", str(a.snr_db));
    note("updates", std::to_string(a.updates));
    note("batch", std::to_string(a.batch));
    note("lr", str(a.lr));
    note("seed", std::to_string(a.seed));
    note("threads", std::to_string(a.parallel_batch ? a.threads : 1));
    note("out", a.out);
    note("loss_out", a.loss_out);
    if (a.parallel_batch) set_blas_threads(a.threads);
    TrainConfig cfg;
    cfg.snr_db = a.snr_db;
    cfg.batch = a.batch;
    cfg.lr = a.lr;
    cfg.updates = a.updates;
    cfg.seed = a.seed;
    RngStream init(cfg.seed, 0);
    AeSystem sys = build_system(kind, a.m, init);
    std::vector<double> trace = train(sys, cfg);
    save_system(sys, a.out);
    write_loss_trace(trace, a.loss_out);
    std::fprintf(stderr, "# final loss %.6g after %zu updates\n", trace.back(),
                 trace.size());
    return 0;
}

int run_eval(const EvalArgs& a) {
    SystemKind kind = system_kind_from_string(a.system);
    note("command", "eval");
    note("system", a.system);
    note("m", std::to_string(a.m));
    note("model", a.model);
    note_sweep(a.sweep);
    auto sys = std::make_shared<const AeSystem>(load_system(kind, a.m, a.model));
    SerCurve curve =
        ser_sweep(make_ae_transceiver(sys), snr_grid(a.sweep),
                  stopping_rule(a.sweep), a.sweep.seed, a.system + "-ae",
                  a.sweep.threads);
    write_curve(curve, a.sweep.out);
    return 0;
}

int run_baseline(const BaselineArgs& a, bool constellation_given) {
    note("command", "baseline");
    note("scheme", a.scheme);
    Transceiver trx;
    std::string tag;
    if (a.scheme == "alamouti") {
        Constellation c = resolve_constellation(a.constellation);
        tag = "alamouti-" + c.name();
        note("constellation", c.name());
        trx = make_alamouti_transceiver(std::move(c));
    } else if (a.scheme == "svd") {
        if (constellation_given && a.constellation != "qpsk")
            throw InvalidInputError(
                "the svd baseline is equal-power qpsk; use svd-alloc for "
                "other rates");
        tag = "svd-qpsk";
        trx = make_svd_qpsk_transceiver();
    } else if (a.scheme == "svd-alloc") {
        note("m", std::to_string(a.m));
        tag = "svd-alloc";
        trx = make_svd_alloc_transceiver(a.m);
    } else {
        Constellation c = resolve_constellation(a.constellation);
        tag = "zf-" + c.name();
        note("constellation", c.name());
        trx = make_zf_transceiver(std::move(c));
    }
    note_sweep(a.sweep);
    SerCurve curve = ser_sweep(trx, snr_grid(a.sweep), stopping_rule(a.sweep),
                               a.sweep.seed, tag, a.sweep.threads);
    write_curve(curve, a.sweep.out);
    return 0;
}

int run_shape(const ShapeArgs& a) {
    note("command", "shape");
    note("m", std::to_string(a.m));
    note("out", a.out);
    Constellation c = Constellation::build(ConstellationKind::qpsk);
    if (!a.model.empty()) {
        note("model", a.model);
        c = extract_siso_constellation(
            load_system(SystemKind::siso, a.m, a.model));
    } else {
        note("snr_db", str(a.snr_db));
        note("updates", std::to_string(a.updates));
        note("batch", std::to_string(a.batch));
        note("lr", str(a.lr));
        note("seed", std::to_string(a.seed));
        note("threads", std::to_string(a.parallel_batch ? a.threads : 1));
        if (a.parallel_batch) set_blas_threads(a.threads);
        TrainConfig cfg;
        cfg.snr_db = a.snr_db;
        cfg.batch = a.batch;
        cfg.lr = a.lr;
        cfg.updates = a.updates;
        cfg.seed = a.seed;
        c = train_siso_shaping(a.m, cfg);
    }
    save_constellation(c, a.out);
    return 0;
}

int run_compare(const CompareArgs& a) {
    SystemKind kind = system_kind_from_string(a.system);
    note("command", "compare");
    note("system", a.system);
    note("m", std::to_string(a.m));
    note("model", a.model);
    if (!a.scatter_out.empty()) {
        if (kind != SystemKind::open_loop)
            throw InvalidInputError("--scatter-out is open-loop only");
        note("scatter_out", a.scatter_out);
    }
    note_sweep(a.sweep);
    auto sys = std::make_shared<const AeSystem>(load_system(kind, a.m, a.model));
    std::vector<std::pair<std::string, Transceiver>> schemes;
    schemes.emplace_back(to_string(kind) + "-ae", make_ae_transceiver(sys));
    switch (kind) {
        case SystemKind::siso: {
            Constellation c = reference_constellation(a.m);
            std::string tag = "awgn-" + c.name();
            schemes.emplace_back(std::move(tag),
                                 make_awgn_transceiver(std::move(c)));
            break;
        }
        case SystemKind::open_loop: {
            Constellation c = reference_constellation(a.m);
            std::string tag = "alamouti-" + c.name();
            schemes.emplace_back(std::move(tag),
                                 make_alamouti_transceiver(std::move(c)));
            break;
        }
        case SystemKind::closed_loop:
            schemes.emplace_back("svd-qpsk", make_svd_qpsk_transceiver());
            schemes.emplace_back("svd-alloc", make_svd_alloc_transceiver(a.m));
            break;
        case SystemKind::mu_mimo: {
            Constellation c = reference_constellation(a.m);
            std::string tag = "zf-" + c.name();
            schemes.emplace_back(std::move(tag),
                                 make_zf_transceiver(std::move(c)));
            break;
        }
    }
    std::vector<double> snrs = snr_grid(a.sweep);
    StoppingRule rule = stopping_rule(a.sweep);
    std::vector<SerCurve> curves;
    curves.reserve(schemes.size());
    for (auto& [tag, trx] : schemes)
        curves.push_back(
            ser_sweep(trx, snrs, rule, a.sweep.seed, tag, a.sweep.threads));
    write_curves(curves, a.sweep.out);
    if (!a.scatter_out.empty())
        write_codebook_scatter(extract_openloop_codebook(*sys), a.scatter_out);
    return 0;
}

void add_sweep_options(CLI::App* sub, SweepArgs& a) {
    sub->add_option("--snr-start", a.snr_start, "sweep start in dB");
    sub->add_option("--snr-stop", a.snr_stop, "sweep stop in dB, inclusive");
    sub->add_option("--snr-step", a.snr_step, "sweep step in dB");
    sub->add_option("--min-errors", a.min_errors,
                    "stop a point after this many errors");
    sub->add_option("--max-symbols", a.max_symbols,
                    "hard cap on symbols per point");
    sub->add_option("--seed", a.seed, "master seed");
    sub->add_option("--threads", a.threads, "evaluation worker threads")
        ->envname("MIMO_AE_THREADS")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", a.out, "output CSV path")->required();
}

const std::vector<std::string> kSystems = {"siso", "open-loop", "closed-loop",
                                           "mu-mimo"};

// CLI11 only processes config files registered on the root command, so each
// subcommand's file is applied by hand after parsing: a key fills its option
// only when the flag was absent, so explicit flags override the file.
void apply_config_defaults(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("config: cannot open " + path);
    auto trim = [](const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        std::size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("config: line " + std::to_string(lineno) +
                                    " is not key=value");
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config")
            throw InvalidInputError("config: unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO autoencoder and classical baseline simulator"};
    app.require_subcommand(1);

    TrainArgs train_args;
    std::string train_config;
    CLI::App* train_cmd =
        app.add_subcommand("train", "train a system, write model + loss trace");
    train_cmd->add_option("--config", train_config,
                          "key=value defaults, flags override");
    train_cmd->add_option("--system", train_args.system, "system kind")
        ->required()
        ->check(CLI::IsMember(kSystems));
    train_cmd->add_option("--m", train_args.m, "constellation/message size")
        ->required()
        ->check(CLI::Range(std::size_t(2), std::size_t(1) << 20));
    CLI::Option* train_snr =
        train_cmd->add_option("--snr-db", train_args.snr_db,
                              "training SNR in dB (default per system)");
    CLI::Option* train_updates =
        train_cmd->add_option("--updates", train_args.updates,
                              "gradient updates (default per system)");
    train_cmd->add_option("--batch", train_args.batch, "batch size")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", train_args.lr, "Adam learning rate")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_args.seed, "master seed");
    train_cmd->add_option("--threads", train_args.threads, "worker threads")
        ->envname("MIMO_AE_THREADS")
        ->check(CLI::PositiveNumber);
    train_cmd->add_flag("--parallel-batch", train_args.parallel_batch,
                        "threaded matrix products; not bit-reproducible");
    train_cmd->add_option("--out", train_args.out, "model container path")
        ->required();
    train_cmd->add_option("--loss-out", train_args.loss_out,
                          "loss trace CSV path");

    EvalArgs eval_args;
    std::string eval_config;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "SER sweep of a trained model");
    eval_cmd->add_option("--config", eval_config,
                         "key=value defaults, flags override");
    eval_cmd->add_option("--system", eval_args.system, "system kind")
        ->required()
        ->check(CLI::IsMember(kSystems));
    eval_cmd->add_option("--m", eval_args.m, "constellation/message size")
        ->required();
    eval_cmd->add_option("--model", eval_args.model, "model container path")
        ->required();
    add_sweep_options(eval_cmd, eval_args.sweep);

    BaselineArgs baseline_args;
    std::string baseline_config;
    CLI::App* baseline_cmd =
        app.add_subcommand("baseline", "SER sweep of a classical scheme");
    baseline_cmd->add_option("--config", baseline_config,
                             "key=value defaults, flags override");
    baseline_cmd->add_option("--scheme", baseline_args.scheme, "scheme")
        ->required()
        ->check(CLI::IsMember(
            std::vector<std::string>{"alamouti", "svd", "svd-alloc", "zf"}));
    CLI::Option* baseline_constellation = baseline_cmd->add_option(
        "--constellation", baseline_args.constellation,
        "catalog name or saved constellation file");
    baseline_cmd->add_option("--m", baseline_args.m,
                             "total constellation size (svd-alloc)");
    add_sweep_options(baseline_cmd, baseline_args.sweep);

    ShapeArgs shape_args;
    std::string shape_config;
    CLI::App* shape_cmd = app.add_subcommand(
        "shape", "learn a constellation over AWGN, write it as a file");
    shape_cmd->add_option("--config", shape_config,
                          "key=value defaults, flags override");
    shape_cmd->add_option("--m", shape_args.m, "constellation size");
    shape_cmd->add_option("--snr-db", shape_args.snr_db, "training SNR in dB");
    shape_cmd->add_option("--updates", shape_args.updates, "gradient updates");
    shape_cmd->add_option("--batch", shape_args.batch, "batch size")
        ->check(CLI::PositiveNumber);
    shape_cmd->add_option("--lr", shape_args.lr, "Adam learning rate")
        ->check(CLI::PositiveNumber);
    shape_cmd->add_option("--seed", shape_args.seed, "master seed");
    shape_cmd->add_option("--threads", shape_args.threads, "worker threads")
        ->envname("MIMO_AE_THREADS")
        ->check(CLI::PositiveNumber);
    shape_cmd->add_flag("--parallel-batch", shape_args.parallel_batch,
                        "threaded matrix products; not bit-reproducible");
    shape_cmd->add_option("--model", shape_args.model,
                          "reuse a trained siso container instead of training");
    shape_cmd->add_option("--out", shape_args.out, "constellation file path")
        ->required();

    CompareArgs compare_args;
    std::string compare_config;
    CLI::App* compare_cmd = app.add_subcommand(
        "compare", "AE curve and its baseline(s) on one grid, merged CSV");
    compare_cmd->add_option("--config", compare_config,
                            "key=value defaults, flags override");
    compare_cmd->add_option("--system", compare_args.system, "system kind")
        ->required()
        ->check(CLI::IsMember(kSystems));
    compare_cmd->add_option("--m", compare_args.m, "constellation/message size")
        ->required();
    compare_cmd->add_option("--model", compare_args.model,
                            "model container path")
        ->required();
    compare_cmd->add_option("--scatter-out", compare_args.scatter_out,
                            "codebook scatter CSV (open-loop)");
    add_sweep_options(compare_cmd, compare_args.sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed() && !train_config.empty())
            apply_config_defaults(train_cmd, train_config);
        if (eval_cmd->parsed() && !eval_config.empty())
            apply_config_defaults(eval_cmd, eval_config);
        if (baseline_cmd->parsed() && !baseline_config.empty())
            apply_config_defaults(baseline_cmd, baseline_config);
        if (shape_cmd->parsed() && !shape_config.empty())
            apply_config_defaults(shape_cmd, shape_config);
        if (compare_cmd->parsed() && !compare_config.empty())
            apply_config_defaults(compare_cmd, compare_config);

        if (train_cmd->parsed()) {
            TrainDefaults d = train_defaults(
                system_kind_from_string(train_args.system), train_args.m);
            if (train_snr->count() == 0) train_args.snr_db = d.snr_db;
            if (train_updates->count() == 0) train_args.updates = d.updates;
            return run_train(train_args);
        }
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (baseline_cmd->parsed())
            return run_baseline(baseline_args,
                                baseline_constellation->count() > 0);
        if (shape_cmd->parsed()) return run_shape(shape_args);
        return run_compare(compare_args);
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "mimoae: %s (update %zu)\n", e.what(),
                     e.update_index);
        return 3;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "mimoae: %s\n", e.what());
        return 4;
    } catch (const InvalidInputError& e) {
        std::fprintf(stderr, "mimoae: %s\n", e.what());
        return 2;
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "mimoae: config: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mimoae: %s\n", e.what());
        return 1;
    }
}
