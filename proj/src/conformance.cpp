#include "imr/conformance.hpp"

#include <omp.h>

#include <iomanip>
#include <sstream>

namespace imr {

namespace {

FitnessReport finish_fitness(std::vector<FitnessReport::Entry> entries) {
    FitnessReport report;
    report.variants = std::move(entries);
    for (const auto& e : report.variants) {
        report.total_weight += e.count;
        if (e.accepted)
            report.accepted_weight += e.count;
    }
    return report;
}

} // namespace

FitnessReport fitness_serial(const EventLog& log, const ProcessTree& tree) {
    TreeAcceptor acceptor(tree);
    std::vector<FitnessReport::Entry> entries;
    entries.reserve(log.variant_count());
    for (const auto& [trace, count] : log.variants())
        entries.push_back({trace, count, acceptor.accepts(trace)});
    return finish_fitness(std::move(entries));
}

FitnessReport fitness(const EventLog& log, const ProcessTree& tree, int workers) {
    std::vector<FitnessReport::Entry> entries(log.variant_count());
    std::size_t i = 0;
    for (const auto& [trace, count] : log.variants()) {
        entries[i].variant = trace;
        entries[i].count = count;
        ++i;
    }
    int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
    {
        TreeAcceptor acceptor(tree);
#pragma omp for schedule(dynamic, 16)
        for (std::size_t k = 0; k < entries.size(); ++k)
            entries[k].accepted = acceptor.accepts(entries[k].variant);
    }
    return finish_fitness(std::move(entries));
}

std::vector<RuleConformance> rule_conformance(const EventLog& log, const RuleSet& rules) {
    std::vector<RuleConformance> rows;
    rows.reserve(rules.size());
    for (const auto& rule : rules) {
        RuleConformance row{rule, 0, 0};
        for (const auto& [trace, count] : log.variants()) {
            row.total += count;
            if (check_trace(rule, trace))
                row.satisfied += count;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string format3(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << v;
    return out.str();
}

} // namespace

std::string fitness_to_text(const FitnessReport& report) {
    std::ostringstream out;
    out << "trace fitness " << report.accepted_weight << "/" << report.total_weight << " = "
        << format3(report.accepted_fraction()) << "\n";
    for (const auto& e : report.variants)
        if (!e.accepted)
            out << "  unfitting x" << e.count << ": " << render_trace(e.variant) << "\n";
    return out.str();
}

std::string fitness_to_csv(const FitnessReport& report) {
    std::ostringstream out;
    out << "variant,count,accepted\n";
    for (const auto& e : report.variants)
        out << csv_quote(render_trace(e.variant)) << "," << e.count << ","
            << (e.accepted ? 1 : 0) << "\n";
    return out.str();
}

std::string conformance_to_text(const std::vector<RuleConformance>& rows) {
    std::ostringstream out;
    for (const auto& row : rows) {
        out << row.rule.str() << ": " << row.satisfied << "/" << row.total << " = "
            << format3(row.value()) << (row.perfect() ? "" : " [violated]") << "\n";
    }
    return out.str();
}

std::string conformance_to_csv(const std::vector<RuleConformance>& rows) {
    std::ostringstream out;
    out << "rule,satisfied,total,confidence\n";
    for (const auto& row : rows)
        out << csv_quote(row.rule.str()) << "," << row.satisfied << "," << row.total << ","
            << format3(row.value()) << "\n";
    return out.str();
}

} // namespace imr
