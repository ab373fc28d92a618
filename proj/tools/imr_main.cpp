#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "imr/conformance.hpp"
#include "imr/declare.hpp"
#include "imr/dfg.hpp"
#include "imr/discovery.hpp"
#include "imr/errors.hpp"
#include "imr/event_log.hpp"
#include "imr/petri_net.hpp"
#include "imr/process_tree.hpp"
#include "imr/version.hpp"
#include "manifest.hpp"

namespace {

using nlohmann::json;

int log_level() {
    static const int level = [] {
        const char* v = std::getenv("IMR_LOG");
        if (!v)
            return 0;
        std::string s(v);
        if (s == "debug" || s == "2")
            return 2;
        if (s.empty() || s == "off" || s == "0")
            return 0;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1)
        std::cerr << "[imr] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2)
        std::cerr << "[imr] " << msg << "\n";
}

class Stopwatch {
public:
    long ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct CsvColumns {
    std::string case_col = "case";
    std::string activity_col = "activity";
    std::string order_col;
};

void add_csv_options(CLI::App* cmd, CsvColumns& cols) {
    cmd->add_option("--case-col", cols.case_col, "CSV case id column")->capture_default_str();
    cmd->add_option("--activity-col", cols.activity_col, "CSV activity column")
        ->capture_default_str();
    cmd->add_option("--order-col", cols.order_col,
                    "CSV numeric ordering column (file order when absent)");
}

imr::EventLog load_log(const std::string& path, const CsvColumns& cols) {
    Stopwatch sw;
    imr::EventLog log = ends_with(path, ".csv")
                            ? imr::load_csv_file(path, cols.case_col, cols.activity_col,
                                                 cols.order_col)
                            : imr::load_xes_file(path);
    log_info("loaded " + path + ": " + std::to_string(log.total_traces()) + " traces, " +
             std::to_string(log.variant_count()) + " variants, " +
             std::to_string(log.alphabet().size()) + " activities (" +
             std::to_string(sw.ms()) + " ms)");
    return log;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw imr::Error("cannot open file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw imr::Error("cannot write file: " + path);
    out << content;
    if (!out)
        throw imr::Error("write failed: " + path);
}

imr::TreePtr load_model(const std::string& path) { return imr::parse_tree(read_file(path)); }

imr::Ratio parse_ratio_flag(const std::string& flag, const std::string& text) {
    try {
        return imr::Ratio::parse(text);
    } catch (const imr::Error& e) {
        throw imr::Error(flag + ": " + std::string(e.what()));
    }
}

json activities_json(const std::set<imr::Activity>& set) {
    json arr = json::array();
    for (const auto& a : set)
        arr.push_back(a);
    return arr;
}

json csv_config_json(const CsvColumns& cols) {
    return {{"case_col", cols.case_col},
            {"activity_col", cols.activity_col},
            {"order_col", cols.order_col}};
}

json recursion_trace_json(const imr::DiscoveryReport& report) {
    json steps = json::array();
    for (const auto& step : report.steps) {
        json j;
        j["alphabet"] = activities_json(step.alphabet);
        if (step.cut) {
            json c;
            c["op"] = std::string(imr::op_token(step.cut->cut.op));
            c["sigma1"] = activities_json(step.cut->cut.sigma1);
            c["sigma2"] = activities_json(step.cut->cut.sigma2);
            c["cost"] = step.cut->cost;
            j["cut"] = std::move(c);
            j["fallback"] = step.fallback;
        } else {
            j["base"] = step.base;
        }
        steps.push_back(std::move(j));
    }
    json doc;
    doc["any_fallback"] = report.any_fallback();
    doc["steps"] = std::move(steps);
    return doc;
}

struct MineOpts {
    std::string log_path;
    std::string out_path;
    std::string min_confidence = "1";
    std::uint64_t min_support = 1;
    int workers = 0;
    CsvColumns cols;
};

void run_mine_rules(const MineOpts& o) {
    imr::EventLog log = load_log(o.log_path, o.cols);
    if (log.total_traces() == 0)
        throw imr::Error("empty log");
    imr::Ratio min_conf = parse_ratio_flag("--min-confidence", o.min_confidence);

    Stopwatch sw;
    imr::RuleSet rules = imr::mine_rules(log, min_conf, o.min_support, o.workers);
    log_info("mined " + std::to_string(rules.size()) + " rules (" + std::to_string(sw.ms()) +
             " ms)");

    write_file(o.out_path, ends_with(o.out_path, ".json") ? imr::rules_to_json(rules)
                                                          : imr::render_rules(rules));

    imr::cli::ManifestBuilder manifest("mine-rules");
    manifest.set_config({{"min_confidence", min_conf.str()},
                         {"min_support", o.min_support},
                         {"csv", csv_config_json(o.cols)}});
    manifest.add_input(o.log_path);
    manifest.add_output(o.out_path);
    manifest.write(o.out_path + ".manifest.json");
}

struct DiscoverOpts {
    std::string log_path;
    std::string out_path;
    std::string rules_path;
    std::string format = "tree";
    std::string sup;
    std::string xor_slack = "0";
    bool strict = false;
    int enumeration_cap = 24;
    int workers = 0;
    bool dump_candidates = false;
    std::string dump_dfg;
    std::string guarantees_path;
    std::size_t max_len = 8;
    std::size_t max_loop = 2;
    std::size_t lang_cap = 1'000'000;
    CsvColumns cols;
};

void run_discover(const DiscoverOpts& o) {
    imr::EventLog log = load_log(o.log_path, o.cols);

    imr::ImrConfig config;
    config.sup = parse_ratio_flag("--sup", o.sup);
    config.xor_slack = parse_ratio_flag("--xor-slack", o.xor_slack);
    config.strict = o.strict;
    config.enumeration_cap = o.enumeration_cap;
    config.workers = o.workers;
    config.collect_candidates = o.dump_candidates;
    if (!o.rules_path.empty())
        config.rules = imr::parse_rules_file(o.rules_path);

    Stopwatch sw;
    imr::DiscoveryReport report = imr::discover(log, config);
    log_info("discovered tree over " + std::to_string(report.tree->alphabet().size()) +
             " activities in " + std::to_string(report.steps.size()) + " recursion steps (" +
             std::to_string(sw.ms()) + " ms)");
    for (const auto& step : report.steps) {
        if (step.cut)
            log_debug("cut " + step.cut->cut.str() + " cost=" + std::to_string(step.cut->cost) +
                      (step.fallback ? " [fallback]" : ""));
        else
            log_debug("base " + step.base);
    }

    std::string model_text;
    if (o.format == "tree")
        model_text = imr::render_tree(*report.tree) + "\n";
    else if (o.format == "pnml")
        model_text = imr::petri_to_pnml(imr::to_petri_net(*report.tree));
    else
        model_text = imr::tree_to_dot(*report.tree);
    write_file(o.out_path, model_text);

    imr::cli::ManifestBuilder manifest("discover");
    manifest.add_input(o.log_path);
    if (!o.rules_path.empty())
        manifest.add_input(o.rules_path);
    manifest.add_output(o.out_path);

    const std::string trace_path = o.out_path + ".trace.json";
    write_file(trace_path, recursion_trace_json(report).dump(2) + "\n");
    manifest.add_output(trace_path);

    if (!o.dump_dfg.empty()) {
        write_file(o.dump_dfg, imr::extract_dfg(log, o.workers).to_dot());
        manifest.add_output(o.dump_dfg);
    }
    if (o.dump_candidates) {
        for (std::size_t i = 0; i < report.steps.size(); ++i) {
            if (!report.steps[i].cut)
                continue;
            std::string path = o.out_path + ".candidates." + std::to_string(i) + ".csv";
            write_file(path, imr::candidates_to_csv(report.steps[i].candidates));
            manifest.add_output(path);
        }
    }
    if (!o.guarantees_path.empty()) {
        auto entries = imr::guarantee_report(*report.tree, config.rules, o.max_len, o.max_loop,
                                             o.lang_cap);
        write_file(o.guarantees_path, imr::guarantees_to_text(entries));
        manifest.add_output(o.guarantees_path);
    }

    manifest.set_config({{"sup", config.sup.str()},
                         {"strict", config.strict},
                         {"xor_slack", config.xor_slack.str()},
                         {"enumeration_cap", config.enumeration_cap},
                         {"format", o.format},
                         {"csv", csv_config_json(o.cols)}});
    manifest.write(o.out_path + ".manifest.json");
}

struct EvalOpts {
    std::string log_path;
    std::string model_path;
    std::string out_path;
    std::string format = "text";
    int workers = 0;
    CsvColumns cols;
};

void run_eval(const EvalOpts& o) {
    imr::EventLog log = load_log(o.log_path, o.cols);
    imr::TreePtr tree = load_model(o.model_path);
    imr::FitnessReport fr = imr::fitness(log, *tree, o.workers);
    std::string text = o.format == "csv" ? imr::fitness_to_csv(fr) : imr::fitness_to_text(fr);
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    write_file(o.out_path, text);
    imr::cli::ManifestBuilder manifest("eval");
    manifest.set_config({{"format", o.format}, {"csv", csv_config_json(o.cols)}});
    manifest.add_input(o.log_path);
    manifest.add_input(o.model_path);
    manifest.add_output(o.out_path);
    manifest.write(o.out_path + ".manifest.json");
}

struct CheckOpts {
    std::string log_path;
    std::string rules_path;
    std::string out_path;
    std::string format = "text";
    CsvColumns cols;
};

void run_check(const CheckOpts& o) {
    imr::EventLog log = load_log(o.log_path, o.cols);
    imr::RuleSet rules = imr::parse_rules_file(o.rules_path);
    auto rows = imr::rule_conformance(log, rules);
    std::string text =
        o.format == "csv" ? imr::conformance_to_csv(rows) : imr::conformance_to_text(rows);
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    write_file(o.out_path, text);
    imr::cli::ManifestBuilder manifest("check");
    manifest.set_config({{"format", o.format}, {"csv", csv_config_json(o.cols)}});
    manifest.add_input(o.log_path);
    manifest.add_input(o.rules_path);
    manifest.add_output(o.out_path);
    manifest.write(o.out_path + ".manifest.json");
}

struct LangOpts {
    std::string model_path;
    std::string out_path;
    std::size_t max_len = 5;
    std::size_t max_loop = 1;
    std::size_t cap = 1'000'000;
};

void run_lang(const LangOpts& o) {
    imr::TreePtr tree = load_model(o.model_path);
    auto traces = imr::bounded_language(*tree, o.max_len, o.max_loop, o.cap);
    std::ostringstream out;
    for (const auto& t : traces)
        out << imr::render_trace(t) << "\n";
    if (o.out_path.empty()) {
        std::cout << out.str();
        return;
    }
    write_file(o.out_path, out.str());
    imr::cli::ManifestBuilder manifest("lang");
    manifest.set_config(
        {{"max_len", o.max_len}, {"max_loop", o.max_loop}, {"cap", o.cap}});
    manifest.add_input(o.model_path);
    manifest.add_output(o.out_path);
    manifest.write(o.out_path + ".manifest.json");
}

int fail(int code, std::string_view what) {
    auto nl = what.find('\n');
    std::cerr << "ERROR " << code << ": " << what.substr(0, nl) << "\n";
    if (nl != std::string_view::npos)
        std::cerr << what.substr(nl + 1) << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rule-guided inductive process discovery"};
    app.set_version_flag("--version", std::string(imr::kToolName) + " " + imr::kVersion);
    app.require_subcommand(1);

    MineOpts mine;
    CLI::App* cmd_mine = app.add_subcommand("mine-rules", "mine declarative rules from a log");
    cmd_mine->add_option("log", mine.log_path, "event log (.xes, .xes.gz or .csv)")->required();
    cmd_mine->add_option("-o,--output", mine.out_path, "rule file (.txt or .json)")->required();
    cmd_mine->add_option("--min-confidence", mine.min_confidence,
                         "minimal fraction of satisfying traces")
        ->capture_default_str();
    cmd_mine->add_option("--min-support", mine.min_support, "minimal activation support")
        ->capture_default_str();
    cmd_mine->add_option("--workers", mine.workers, "worker threads (0 = all cores)");
    add_csv_options(cmd_mine, mine.cols);
    cmd_mine->callback([&] { run_mine_rules(mine); });

    DiscoverOpts disc;
    CLI::App* cmd_disc = app.add_subcommand("discover", "discover a process model from a log");
    cmd_disc->add_option("log", disc.log_path, "event log (.xes, .xes.gz or .csv)")->required();
    cmd_disc->add_option("-o,--output", disc.out_path, "model output file")->required();
    cmd_disc->add_option("--sup", disc.sup, "missing-behavior weight in [0,1]")->required();
    cmd_disc->add_option("--rules", disc.rules_path, "rule file constraining cut selection");
    cmd_disc->add_flag("--strict", disc.strict, "fail when rules reject every cut");
    cmd_disc->add_option("--xor-slack", disc.xor_slack, "x-cut cross-mass tolerance")
        ->capture_default_str();
    cmd_disc->add_option("--enumeration-cap", disc.enumeration_cap,
                         "max alphabet size for cut enumeration")
        ->capture_default_str();
    cmd_disc->add_option("--format", disc.format, "model output format")
        ->check(CLI::IsMember({"tree", "pnml", "dot"}))
        ->capture_default_str();
    cmd_disc->add_option("--workers", disc.workers, "worker threads (0 = all cores)");
    cmd_disc->add_option("--dump-dfg", disc.dump_dfg, "write the log DFG as DOT");
    cmd_disc->add_flag("--dump-candidates", disc.dump_candidates,
                       "write per-recursion candidate tables as CSV");
    cmd_disc->add_option("--guarantees", disc.guarantees_path,
                         "write a rule guarantee report for the result");
    cmd_disc->add_option("--max-len", disc.max_len, "guarantee scan: max trace length")
        ->capture_default_str();
    cmd_disc->add_option("--max-loop", disc.max_loop, "guarantee scan: max loop unrolling")
        ->capture_default_str();
    cmd_disc->add_option("--cap", disc.lang_cap, "guarantee scan: exploration cap")
        ->capture_default_str();
    add_csv_options(cmd_disc, disc.cols);
    cmd_disc->callback([&] { run_discover(disc); });

    EvalOpts eval;
    CLI::App* cmd_eval = app.add_subcommand("eval", "trace fitness of a log against a model");
    cmd_eval->add_option("log", eval.log_path, "event log")->required();
    cmd_eval->add_option("model", eval.model_path, "process tree file")->required();
    cmd_eval->add_option("-o,--output", eval.out_path, "report file (default stdout)");
    cmd_eval->add_option("--format", eval.format, "report format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    cmd_eval->add_option("--workers", eval.workers, "worker threads (0 = all cores)");
    add_csv_options(cmd_eval, eval.cols);
    cmd_eval->callback([&] { run_eval(eval); });

    CheckOpts check;
    CLI::App* cmd_check = app.add_subcommand("check", "per-rule confidence of a log");
    cmd_check->add_option("log", check.log_path, "event log")->required();
    cmd_check->add_option("rules", check.rules_path, "rule file")->required();
    cmd_check->add_option("-o,--output", check.out_path, "report file (default stdout)");
    cmd_check->add_option("--format", check.format, "report format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    add_csv_options(cmd_check, check.cols);
    cmd_check->callback([&] { run_check(check); });

    LangOpts lang;
    CLI::App* cmd_lang = app.add_subcommand("lang", "bounded language of a model");
    cmd_lang->add_option("model", lang.model_path, "process tree file")->required();
    cmd_lang->add_option("-o,--output", lang.out_path, "trace listing file (default stdout)");
    cmd_lang->add_option("--max-len", lang.max_len, "max trace length")->capture_default_str();
    cmd_lang->add_option("--max-loop", lang.max_loop, "max loop unrolling")
        ->capture_default_str();
    cmd_lang->add_option("--cap", lang.cap, "exploration cap")->capture_default_str();
    cmd_lang->callback([&] { run_lang(lang); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << "ERROR 2: " << e.what() << "\n";
        return 2;
    } catch (const imr::StrictModeError& e) {
        return fail(3, e.what());
    } catch (const imr::CapExceededError& e) {
        return fail(4, e.what());
    } catch (const imr::LanguageOverflowError& e) {
        return fail(4, e.what());
    } catch (const imr::Error& e) {
        return fail(2, e.what());
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }
}
