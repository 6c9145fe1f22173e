#include "slacast/error.hpp"
#include "slacast/pipeline.hpp"
#include "slacast/csv_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace slacast;

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> jobs;
    std::string stage;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_stage) {
    cmd->add_option("--config", opt.config, "run configuration (JSON)");
    cmd->add_option("--seed", opt.seed, "master seed, overrides the config");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("-q,--quiet", opt.quiet, "no progress output");
    if (with_stage) cmd->add_option("--stage", opt.stage, "last stage to run");
}

struct Resolved {
    RunConfig config;
    std::string out;
    std::size_t jobs = 1;
};

Resolved resolve(const CommonOptions& opt) {
    const auto env = read_env_overrides();
    Resolved r;
    const std::string path = !opt.config.empty() ? opt.config : env.config.value_or("");
    if (!path.empty()) r.config = load_run_config(path);
    if (opt.seed) r.config.seed = *opt.seed;
    else if (env.seed) r.config.seed = *env.seed;
    r.config.scenario.seed = r.config.seed;
    r.config.validate();
    r.out = !opt.out.empty() ? opt.out : env.out.value_or("slacast-out");
    r.jobs = opt.jobs.value_or(env.jobs.value_or(1));
    if (r.jobs == 0) throw ConfigError("bad-env-value", "jobs must be at least 1");
    return r;
}

Pipeline open(const CommonOptions& opt) {
    auto r = resolve(opt);
    return Pipeline(std::move(r.config), r.out, r.jobs, opt.quiet ? nullptr : &std::cerr);
}

int check_calibration(Pipeline& p) {
    int rc = 0;
    for (double target : p.config().sla_targets) {
        const auto& c = p.calibration(target);
        if (!c.satisfied) {
            std::cerr << "constraint-unsatisfied: no searched w reaches " << sla_percent(target)
                      << "% violations on validation (best " << 100.0 * c.violation_rate << "% at w=" << c.w << ")\n";
            rc = static_cast<int>(ErrorClass::constraint);
        }
    }
    return rc;
}

void print_calibration(Pipeline& p) {
    for (double target : p.config().sla_targets) {
        const auto& c = p.calibration(target);
        std::cout << sla_tag(target) << ": w=" << format_double(c.w)
                  << " val_violation=" << format_double(100.0 * c.violation_rate)
                  << "% val_volume=" << format_double(c.volume) << (c.satisfied ? "" : " (unsatisfied)") << '\n';
    }
}

void print_report(const EvalReport& r) {
    std::cout << "model,sla_percent,horizon,test_loss,violation_rate_percent,overprovisioning_volume\n";
    for (const auto& c : r.cells) {
        if (c.skipped) continue;
        std::cout << display_name(c.variant) << ',' << c.sla_percent << ',' << c.horizon << ','
                  << format_double(c.test_loss) << ',' << format_double(c.violation_rate) << ','
                  << format_double(c.volume) << '\n';
    }
}

std::size_t parse_origin(const std::string& text, const TimeGrid& grid) {
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) return std::stoull(text);
    return grid.index_of(parse_timestamp(text));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLA-aware cellular traffic forecasting"};
    app.require_subcommand(1);
    CommonOptions opt;

    auto* synth = app.add_subcommand("synth", "generate (or ingest) cell data and the handover matrix");
    auto* features = app.add_subcommand("features", "select features and write recipes");
    auto* train = app.add_subcommand("train", "grid search, calibrate and train every variant");
    auto* calibrate = app.add_subcommand("calibrate", "line search for the loss weight of each SLA target");
    auto* predict = app.add_subcommand("predict", "recursive forecast from one origin");
    auto* eval = app.add_subcommand("eval", "score every model on the test slice");
    auto* report = app.add_subcommand("report", "write report JSON and table CSVs");
    auto* run_all = app.add_subcommand("run-all", "full pipeline");
    auto* config = app.add_subcommand("config", "print the effective configuration and its hash");
    for (auto* c : {synth, features, train, calibrate, predict, eval, report, config}) add_common(c, opt, false);
    add_common(run_all, opt, true);

    std::string variant = "univariate";
    int sla = 5;
    std::string origin;
    std::size_t horizon = 24;
    std::string policy;
    std::string output;
    predict->add_option("--variant", variant, "univariate, ran, peak, handover or all");
    predict->add_option("--sla", sla, "SLA target in percent");
    predict->add_option("--origin", origin, "first predicted hour: timestamp or row index")->required();
    predict->add_option("--horizon", horizon, "hours to forecast")->check(CLI::PositiveNumber);
    predict->add_option("--policy", policy, "seasonal-naive or neighbor-recursive");
    predict->add_option("-o,--output", output, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorClass::config);
    }

    try {
        if (config->parsed()) {
            const auto r = resolve(opt);
            std::cout << config_to_json(r.config).dump(2) << "\nconfig_hash " << r.config.hash() << '\n';
            return 0;
        }
        auto p = open(opt);
        if (synth->parsed()) {
            p.run(Stage::synth);
        } else if (features->parsed()) {
            p.run(Stage::features);
        } else if (calibrate->parsed()) {
            p.run(Stage::calibrate);
            print_calibration(p);
            return check_calibration(p);
        } else if (train->parsed()) {
            p.run(Stage::train);
            return check_calibration(p);
        } else if (predict->parsed()) {
            HorizonPlan plan = p.config().horizons;
            if (!policy.empty()) plan.handover_policy = parse_policy(policy);
            const std::size_t row = parse_origin(origin, p.target().grid());
            const auto pred = p.predict(parse_variant(variant), sla / 100.0, row, horizon, plan);
            std::ofstream file;
            if (!output.empty()) {
                file.open(output);
                if (!file) throw DataError("io-error", "cannot write " + output);
            }
            std::ostream& out = output.empty() ? std::cout : file;
            out << "timestamp,step,pred_" << variant << '\n';
            const HourStamp start = p.target().grid().at(0) + static_cast<HourStamp>(row);
            for (std::size_t i = 0; i < pred.size(); ++i)
                out << format_timestamp(start + static_cast<HourStamp>(i)) << ',' << i + 1 << ','
                    << format_double(pred[i]) << '\n';
            return 0;
        } else if (eval->parsed()) {
            p.run(Stage::eval);
            print_report(p.report());
            return check_calibration(p);
        } else if (report->parsed()) {
            p.run(Stage::report);
            std::cout << (p.out() / "report" / "report.json").string() << '\n';
            return check_calibration(p);
        } else if (run_all->parsed()) {
            const Stage last = opt.stage.empty() ? Stage::report : parse_stage(opt.stage);
            p.run(last);
            if (last >= Stage::calibrate) return check_calibration(p);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
