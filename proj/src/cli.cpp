#include "biclab/cli.hpp"

#include "biclab/bigraph.hpp"
#include "biclab/dtree.hpp"
#include "biclab/features.hpp"
#include "biclab/phaselab.hpp"
#include "biclab/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace biclab {

namespace {

    struct Global {
        bool verbose = false;
    };

    auto budget_from(std::optional<std::uint64_t> b) -> SearchBudget
    {
        return b ? SearchBudget::of(*b) : SearchBudget::unlimited();
    }

    auto load_config(const std::string& path, std::optional<std::uint64_t> seed_override) -> std::pair<EnsembleConfig, nlohmann::json>
    {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(path));
        }
        catch (const nlohmann::json::exception& e) {
            throw ParseError(0, path + ": " + e.what());
        }
        EnsembleConfig c;
        try {
            c = config_from_json(j);
        }
        catch (const nlohmann::json::exception& e) {
            throw ParseError(0, path + ": " + e.what());
        }
        catch (const std::invalid_argument& e) {
            throw ParseError(0, path + ": " + e.what());
        }
        if (seed_override)
            c.seed = *seed_override;
        return {c, j};
    }

    /// Resolved configuration written next to an output file.
    void write_meta(const std::string& output, const std::string& command, nlohmann::json config)
    {
        nlohmann::json meta{{"command", command}, {"config", std::move(config)}};
        write_text_file(output + ".meta.json", meta.dump(2) + "\n");
    }

    void emit(const std::string& text, const std::string& output, std::ostream& out)
    {
        if (output.empty() || output == "-")
            out << text;
        else
            write_text_file(output, text);
    }

    auto join_labels(const BipartiteGraph& g, const std::vector<std::uint32_t>& xs, bool u_side) -> std::string
    {
        std::string s;
        for (auto x : xs) {
            s += ' ';
            s += u_side ? g.u_label(x) : g.v_label(x);
        }
        return s;
    }

    auto fmt(double x) -> std::string
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", x);
        return buf;
    }

    // ---- subcommands ---------------------------------------------------------

    struct GenArgs {
        std::string config;
        std::string out_dir;
        std::optional<std::uint64_t> seed;
    };

    auto run_gen(const GenArgs& a, const Global& global, std::ostream& out, std::ostream& err) -> int
    {
        auto [config, raw] = load_config(a.config, a.seed);
        std::error_code ec;
        fs::create_directories(a.out_dir, ec);
        if (ec)
            throw IoError("cannot create directory '" + a.out_dir + "': " + ec.message());
        for (std::size_t i = 0; i < config.instance_count; ++i) {
            auto og = generate_instance(config, i);
            char name[32];
            std::snprintf(name, sizeof name, "instance_%06zu.edges", i);
            write_text_file(fs::path(a.out_dir) / name, to_edge_list(og.graph));
            if (global.verbose)
                err << "wrote " << name << '\n';
        }
        write_text_file(fs::path(a.out_dir) / "ensemble.json", to_json(config).dump(2) + "\n");
        out << "generated " << config.instance_count << " instance(s) in " << a.out_dir << '\n';
        return exit_code::ok;
    }

    struct FeaturesArgs {
        std::vector<std::string> graphs;
        std::string output;
        std::uint32_t pair_threshold = default_pair_threshold;
    };

    auto run_features(const FeaturesArgs& a, std::ostream& out) -> int
    {
        std::string csv = feature_csv_header() + "\n";
        for (const auto& path : a.graphs) {
            auto og = from_observation_log(read_text_file(path));
            csv += to_csv_row(extract_features(og.graph, og.w, a.pair_threshold)) + "\n";
        }
        emit(csv, a.output, out);
        if (!a.output.empty() && a.output != "-")
            write_meta(a.output, "features", {{"graphs", a.graphs}, {"pair_threshold", a.pair_threshold}});
        return exit_code::ok;
    }

    struct LabelArgs {
        std::vector<std::string> graphs;
        std::string output;
        std::uint64_t budget = default_label_budget;
        std::uint32_t pair_threshold = default_pair_threshold;
    };

    auto run_label(const LabelArgs& a, const Global& global, std::ostream& out, std::ostream& err) -> int
    {
        std::string csv = feature_csv_header() + "\n";
        auto budget = SearchBudget::of(a.budget);
        for (const auto& path : a.graphs) {
            auto og = from_observation_log(read_text_file(path));
            auto fv = extract_features(og.graph, og.w, a.pair_threshold);
            auto outcome = label_instance(og.graph, budget);
            fv.label = outcome.label;
            csv += to_csv_row(fv) + "\n";
            if (global.verbose)
                err << path << ": " << to_string(outcome.label) << " after "
                    << outcome.report.combinations_explored << " combinations\n";
        }
        emit(csv, a.output, out);
        if (!a.output.empty() && a.output != "-")
            write_meta(a.output, "label",
                       {{"graphs", a.graphs}, {"budget", a.budget}, {"pair_threshold", a.pair_threshold}});
        return exit_code::ok;
    }

    struct TreeArgs {
        std::size_t min_leaf = 2;
        std::size_t max_depth = 12;
        double min_gain_ratio = 0.0;
        bool prune = false;
        double confidence = 0.25;

        [[nodiscard]] auto params() const -> TreeParams
        {
            return {min_leaf, max_depth, min_gain_ratio, prune, confidence};
        }
    };

    struct TrainArgs {
        std::string data;
        std::string tree_out;
        std::string json_out;
        std::string eval_prefix;
        double split = 0.7;
        std::size_t folds = 10;
        std::uint64_t seed = 0;
        TreeArgs tree;
    };

    void report_eval(const EvalReport& rep, const std::string& prefix, std::ostream& out)
    {
        out << "fpr " << fmt(rep.fpr) << '\n';
        out << "fnr " << fmt(rep.fnr) << '\n';
        out << "accuracy " << fmt(rep.accuracy) << '\n';
        out << "auc " << (rep.auc ? fmt(*rep.auc) : std::string("undefined")) << '\n';
        if (!prefix.empty()) {
            write_text_file(prefix + "_roc.csv", roc_csv(rep));
            write_text_file(prefix + "_pr.csv", pr_csv(rep));
        }
    }

    auto run_train(const TrainArgs& a, std::ostream& out) -> int
    {
        auto data = parse_feature_csv(read_text_file(a.data));
        auto split = split_dataset(data, a.split, a.seed);
        auto cv = kfold_cv(split.train, a.folds, a.tree.params(), a.seed);

        for (std::size_t f = 0; f < cv.folds.size(); ++f)
            out << "fold " << f << " accuracy " << fmt(cv.folds[f].accuracy) << " fpr " << fmt(cv.folds[f].fpr)
                << " fnr " << fmt(cv.folds[f].fnr) << '\n';
        out << "best_fold " << cv.best_fold << '\n';
        out << "validation_size " << split.test.size() << '\n';
        report_eval(evaluate(cv.best_tree, split.test), a.eval_prefix, out);
        for (const auto& rule : extract_rules(cv.best_tree))
            out << "rule " << to_text(rule) << '\n';

        if (a.tree_out.empty())
            out << to_text(cv.best_tree);
        else
            write_text_file(a.tree_out, to_text(cv.best_tree));
        if (!a.json_out.empty())
            write_text_file(a.json_out, to_json(cv.best_tree).dump(2) + "\n");
        return exit_code::ok;
    }

    struct EvalArgs {
        std::string tree;
        std::string data;
        std::string eval_prefix;
    };

    auto run_eval(const EvalArgs& a, std::ostream& out) -> int
    {
        DecisionTree tree = [&] {
            try {
                return tree_from_json(nlohmann::json::parse(read_text_file(a.tree)));
            }
            catch (const nlohmann::json::exception& e) {
                throw ParseError(0, a.tree + ": " + e.what());
            }
        }();
        auto data = parse_feature_csv(read_text_file(a.data));
        report_eval(evaluate(tree, data), a.eval_prefix, out);
        return exit_code::ok;
    }

    struct SolveArgs {
        std::string graph;
        std::size_t z = 0;
        std::optional<std::size_t> t;
        bool max_weight = false;
        std::optional<std::uint64_t> budget;
        std::string blacklist = "subset";
        bool no_guarantee = false;
    };

    auto run_solve(const SolveArgs& a, std::ostream& out) -> int
    {
        auto og = from_observation_log(read_text_file(a.graph));
        const auto& g = og.graph;
        auto budget = budget_from(a.budget);
        SolveOptions opts{parse_blacklist_mode(a.blacklist), !a.no_guarantee};

        const char* mode = a.t ? "decide" : (a.max_weight ? "max-weight" : "first-hit");
        out << "graph " << a.graph << '\n';
        out << "mode " << mode << '\n';
        out << "z " << a.z << '\n';
        out << "t " << (a.t ? std::to_string(*a.t) : std::string("-")) << '\n';
        out << "budget " << (a.budget ? std::to_string(*a.budget) : std::string("unlimited")) << '\n';
        out << "blacklist " << a.blacklist << '\n';
        out << "guarantee_check " << (opts.guarantee_check ? "true" : "false") << '\n';

        SolveReport report;
        int code;
        if (a.t) {
            auto d = decide(g, *a.t, a.z, budget, opts);
            out << "verdict " << to_string(d.verdict) << '\n';
            report = std::move(d.report);
            code = d.verdict == Verdict::yes ? exit_code::found
                   : d.verdict == Verdict::no ? exit_code::no_solution
                                              : exit_code::unknown;
        }
        else {
            report = a.max_weight ? find_max_weight_of_size(g, a.z, budget, opts) : find_biclique(g, a.z, budget, opts);
            code = report.found ? exit_code::found
                   : report.budget_exhausted ? exit_code::unknown
                                             : exit_code::no_solution;
        }
        out << to_text(report);
        if (report.found) {
            out << "u_labels" << join_labels(g, report.found->u_set, true) << '\n';
            out << "v_labels" << join_labels(g, report.found->v_set, false) << '\n';
        }
        return code;
    }

    struct SweepArgs {
        std::string config;
        std::string output;
        std::string runs_out;
        std::size_t jobs = 1;
        std::optional<std::uint64_t> seed;
        std::vector<int> d_values;
    };

    auto run_sweep_cmd(const SweepArgs& a, const Global& global, std::ostream& out, std::ostream& err) -> int
    {
        auto [config, raw] = load_config(a.config, a.seed);
        std::size_t done = 0;
        SweepOptions opts{a.jobs, [&](std::size_t) {
                              ++done;
                              if (global.verbose && done % 100 == 0)
                                  err << done << '/' << config.instance_count << " instances\n";
                          }};
        auto result = run_sweep(config, opts);
        write_sweep_csv(result, a.output);
        if (!a.runs_out.empty()) {
            std::string runs = "instance,z,v,zmax,pi_log2,cost,solvable,unknown\n";
            for (const auto& r : result.runs)
                runs += std::to_string(r.instance) + ',' + std::to_string(r.z) + ',' + std::to_string(r.v_card) + ','
                        + std::to_string(r.z_max) + ',' + (std::isinf(r.pi_log2) ? std::string("-inf") : fmt(r.pi_log2))
                        + ',' + std::to_string(r.cost) + ',' + (r.solvable ? "1" : "0") + ','
                        + (r.unknown ? "1" : "0") + '\n';
            write_text_file(a.runs_out, runs);
        }
        write_meta(a.output, "sweep", to_json(config));
        out << "wrote " << result.bins.size() << " bin(s) to " << a.output << '\n';
        return exit_code::ok;
    }

    auto run_dsweep_cmd(const SweepArgs& a, const Global& global, std::ostream& out, std::ostream& err) -> int
    {
        auto [config, raw] = load_config(a.config, a.seed);
        auto d_values = a.d_values;
        if (d_values.empty() && raw.contains("d_values"))
            d_values = raw.at("d_values").get<std::vector<int>>();
        if (d_values.empty())
            for (int d = -2; d <= 10; ++d)
                d_values.push_back(d);

        std::size_t done = 0;
        SweepOptions opts{a.jobs, [&](std::size_t) {
                              ++done;
                              if (global.verbose && done % 100 == 0)
                                  err << done << '/' << config.instance_count << " instances\n";
                          }};
        auto result = run_distance_sweep(config, d_values, opts);
        write_distance_csv(result, a.output);
        auto meta = to_json(config);
        meta["d_values"] = d_values;
        write_meta(a.output, "dsweep", meta);
        out << "wrote " << result.rows.size() << " row(s) to " << a.output << "; skipped " << result.skipped
            << " instance(s) with z_max < 2\n";
        return exit_code::ok;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"biclab: biclique search, phase-transition sweeps and order-parameter discovery"};
    app.require_subcommand(1);
    Global global;
    app.add_flag("-v,--verbose", global.verbose, "Progress messages on stderr");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write an ensemble of edge-list files from a config");
    gen_cmd->add_option("--config", gen.config, "EnsembleConfig JSON")->required();
    gen_cmd->add_option("--out-dir", gen.out_dir, "Directory for instance_NNNNNN.edges files")->required();
    gen_cmd->add_option("--seed", gen.seed, "Override the config seed");

    FeaturesArgs feat;
    auto* feat_cmd = app.add_subcommand("features", "Feature vectors of graph files as CSV");
    feat_cmd->add_option("graphs", feat.graphs, "Edge-list / observation-log files")->required();
    feat_cmd->add_option("-o,--output", feat.output, "Output CSV (default stdout)");
    feat_cmd->add_option("--pair-threshold", feat.pair_threshold, "Minimum gram entry counted as a 2-weight/2-size biclique")
        ->capture_default_str();

    LabelArgs lab;
    auto* label_cmd = app.add_subcommand("label", "Feature vectors labelled EASY/HARD under a combination budget");
    label_cmd->add_option("graphs", lab.graphs, "Edge-list / observation-log files")->required();
    label_cmd->add_option("-o,--output", lab.output, "Output CSV (default stdout)");
    label_cmd->add_option("--budget", lab.budget, "Combination budget of the size-maximal search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    label_cmd->add_option("--pair-threshold", lab.pair_threshold, "Minimum gram entry counted as a 2-weight/2-size biclique")
        ->capture_default_str();

    auto add_tree_flags = [](CLI::App* cmd, TreeArgs& t) {
        cmd->add_option("--min-leaf", t.min_leaf, "Minimum vectors per leaf")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--max-depth", t.max_depth, "Maximum tree depth")->capture_default_str();
        cmd->add_option("--min-gain-ratio", t.min_gain_ratio, "Smallest gain ratio worth splitting on")->capture_default_str();
        cmd->add_flag("--prune", t.prune, "Error-based pruning after growth");
        cmd->add_option("--confidence", t.confidence, "Pruning confidence level")->capture_default_str()->check(CLI::Range(0.0001, 0.9999));
    };

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a decision tree with hold-out split and k-fold CV");
    train_cmd->add_option("data", train.data, "Labelled feature CSV")->required();
    train_cmd->add_option("--tree-out", train.tree_out, "Tree as indented text (default stdout)");
    train_cmd->add_option("--json-out", train.json_out, "Tree as JSON, readable by 'eval'");
    train_cmd->add_option("--eval-prefix", train.eval_prefix, "Write <prefix>_roc.csv and <prefix>_pr.csv for the validation set");
    train_cmd->add_option("--split", train.split, "Training fraction of the hold-out split")->capture_default_str()->check(CLI::Range(0.01, 0.99));
    train_cmd->add_option("--folds", train.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    train_cmd->add_option("--seed", train.seed, "Shuffling seed")->capture_default_str();
    add_tree_flags(train_cmd, train.tree);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a JSON tree on a labelled feature CSV");
    eval_cmd->add_option("--tree", ev.tree, "Tree JSON written by 'train --json-out'")->required();
    eval_cmd->add_option("data", ev.data, "Labelled feature CSV")->required();
    eval_cmd->add_option("--eval-prefix", ev.eval_prefix, "Write <prefix>_roc.csv and <prefix>_pr.csv");

    SolveArgs sol;
    auto* solve_cmd = app.add_subcommand("solve", "Search one graph; exit 0 found/YES, 1 none/NO, 2 unknown");
    solve_cmd->add_option("graph", sol.graph, "Edge-list file")->required();
    solve_cmd->add_option("--z", sol.z, "Biclique size |V'|")->required()->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30));
    auto* t_opt = solve_cmd->add_option("--t", sol.t, "Decide whether a biclique with weight >= t and size >= z exists")
                      ->check(CLI::PositiveNumber);
    solve_cmd->add_flag("--max-weight", sol.max_weight, "Return the heaviest size-z biclique")->excludes(t_opt);
    solve_cmd->add_option("--budget", sol.budget, "Combination budget (default unlimited)")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--blacklist", sol.blacklist, "subset | literal | off")
        ->capture_default_str()
        ->check(CLI::IsMember({"subset", "literal", "off"}));
    solve_cmd->add_flag("--no-guarantee-check", sol.no_guarantee, "Search even when z exceeds the gram-derived z_max");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Phase-transition sweep: binned percentile costs and solvability");
    sweep_cmd->add_option("--config", sw.config, "EnsembleConfig JSON")->required();
    sweep_cmd->add_option("-o,--output", sw.output, "Sweep CSV")->required();
    sweep_cmd->add_option("--runs-out", sw.runs_out, "Per-run CSV");
    sweep_cmd->add_option("--jobs", sw.jobs, "Worker threads; output does not depend on it")->capture_default_str()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", sw.seed, "Override the config seed");

    SweepArgs dsw;
    auto* dsweep_cmd = app.add_subcommand("dsweep", "Distance-to-optimal sweep: mean cost per d = z_max - z");
    dsweep_cmd->add_option("--config", dsw.config, "EnsembleConfig JSON")->required();
    dsweep_cmd->add_option("-o,--output", dsw.output, "Distance CSV")->required();
    dsweep_cmd->add_option("--d", dsw.d_values, "Distances (default: config d_values, else -2..10)")->delimiter(',');
    dsweep_cmd->add_option("--jobs", dsw.jobs, "Worker threads; output does not depend on it")->capture_default_str()->check(CLI::PositiveNumber);
    dsweep_cmd->add_option("--seed", dsw.seed, "Override the config seed");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args)
        argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e) {
        auto code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    try {
        if (*gen_cmd)
            return run_gen(gen, global, out, err);
        if (*feat_cmd)
            return run_features(feat, out);
        if (*label_cmd)
            return run_label(lab, global, out, err);
        if (*train_cmd)
            return run_train(train, out);
        if (*eval_cmd)
            return run_eval(ev, out);
        if (*solve_cmd)
            return run_solve(sol, out);
        if (*sweep_cmd)
            return run_sweep_cmd(sw, global, out, err);
        if (*dsweep_cmd)
            return run_dsweep_cmd(dsw, global, out, err);
    }
    catch (const IoError& e) {
        err << "biclab: " << e.what() << '\n';
        return exit_code::io_error;
    }
    catch (const ParseError& e) {
        err << "biclab: " << e.what() << '\n';
        return exit_code::data_error;
    }
    catch (const std::invalid_argument& e) {
        err << "biclab: " << e.what() << '\n';
        return exit_code::usage;
    }
    return exit_code::usage;
}

} // namespace biclab
