#include "imr/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/iostreams/copy.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_streambuf.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace imr {

void validate_activity(const Activity& a) {
    if (a.empty())
        throw Error("activity label must be non-empty");
    if (a.find('\n') != std::string::npos || a.find('\r') != std::string::npos)
        throw Error("activity label must not contain newlines");
}

void EventLog::add_trace(Trace t, std::uint64_t count) {
    if (count == 0)
        throw Error("trace multiplicity must be positive");
    for (const auto& a : t)
        validate_activity(a);
    variants_[std::move(t)] += count;
    total_ += count;
}

std::uint64_t EventLog::total_events() const {
    std::uint64_t n = 0;
    for (const auto& [trace, count] : variants_)
        n += trace.size() * count;
    return n;
}

std::set<Activity> EventLog::alphabet() const {
    std::set<Activity> acts;
    for (const auto& [trace, count] : variants_)
        acts.insert(trace.begin(), trace.end());
    return acts;
}

EventLog EventLog::project(const std::set<Activity>& keep) const {
    EventLog out;
    for (const auto& [trace, count] : variants_) {
        Trace filtered;
        filtered.reserve(trace.size());
        for (const auto& a : trace)
            if (keep.count(a))
                filtered.push_back(a);
        out.add_trace(std::move(filtered), count);
    }
    return out;
}

namespace {

bool is_gzip(const std::string& data) {
    return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
           static_cast<unsigned char>(data[1]) == 0x8b;
}

std::string gunzip(const std::string& data) {
    std::istringstream src(data);
    boost::iostreams::filtering_streambuf<boost::iostreams::input> in;
    in.push(boost::iostreams::gzip_decompressor());
    in.push(src);
    std::ostringstream dst;
    boost::iostreams::copy(in, dst);
    return dst.str();
}

EventLog parse_xes_string(const std::string& xml) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    std::istringstream in(xml);
    try {
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("XES parse error at line " + std::to_string(e.line()) + ": " +
                         e.message());
    }
    auto log = doc.get_child_optional("log");
    if (!log)
        throw ParseError("XES parse error: no <log> element");

    EventLog out;
    std::size_t trace_index = 0;
    for (const auto& [name, node] : *log) {
        if (name != "trace")
            continue;
        Trace t;
        for (const auto& [cname, child] : node) {
            if (cname != "event")
                continue;
            std::string label;
            bool found = false;
            for (const auto& [ename, attr] : child) {
                if (ename != "string")
                    continue;
                if (attr.get<std::string>("<xmlattr>.key", "") == "concept:name") {
                    label = attr.get<std::string>("<xmlattr>.value", "");
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ParseError("XES: event without concept:name in trace " +
                                 std::to_string(trace_index));
            t.push_back(label);
        }
        out.add_trace(std::move(t));
        ++trace_index;
    }
    return out;
}

} // namespace

EventLog load_xes(std::istream& in) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (is_gzip(data))
        data = gunzip(data);
    return parse_xes_string(data);
}

EventLog load_xes_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    return load_xes(in);
}

namespace {

// RFC 4180 style records: quoted fields may contain commas, doubled
// quotes and newlines. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n')
                in.get();
            break;
        } else {
            field.push_back(ch);
        }
    }
    if (!any)
        return false;
    fields.push_back(std::move(field));
    return true;
}

} // namespace

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out += "\"";
    return out;
}

EventLog load_csv(std::istream& in, const std::string& case_column,
                  const std::string& activity_column, const std::string& order_column) {
    std::vector<std::string> header;
    if (!read_csv_record(in, header))
        throw ParseError("CSV: empty input");

    auto column = [&](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    int case_idx = column(case_column);
    if (case_idx < 0)
        throw ParseError("CSV: missing column '" + case_column + "'");
    int act_idx = column(activity_column);
    if (act_idx < 0)
        throw ParseError("CSV: missing column '" + activity_column + "'");
    int order_idx = -1;
    if (!order_column.empty()) {
        order_idx = column(order_column);
        if (order_idx < 0)
            throw ParseError("CSV: missing column '" + order_column + "'");
    }

    struct Event {
        double order;
        std::uint64_t seq;
        Activity activity;
    };
    std::map<std::string, std::vector<Event>> cases;
    std::vector<std::string> fields;
    std::uint64_t row = 1; // header row
    std::uint64_t seq = 0;
    while (read_csv_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty())
            continue; // blank line
        if (fields.size() != header.size())
            throw ParseError("CSV: row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        double order = 0.0;
        if (order_idx >= 0) {
            const std::string& text = fields[order_idx];
            std::size_t pos = 0;
            try {
                order = std::stod(text, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (pos != text.size() || text.empty())
                throw ParseError("CSV: unparsable order value '" + text + "' in row " +
                                 std::to_string(row));
        }
        cases[fields[case_idx]].push_back({order, seq++, fields[act_idx]});
    }

    EventLog out;
    for (auto& [case_id, events] : cases) {
        std::stable_sort(events.begin(), events.end(),
                         [](const Event& a, const Event& b) { return a.order < b.order; });
        Trace t;
        t.reserve(events.size());
        for (auto& e : events)
            t.push_back(std::move(e.activity));
        out.add_trace(std::move(t));
    }
    return out;
}

EventLog load_csv_file(const std::string& path, const std::string& case_column,
                       const std::string& activity_column, const std::string& order_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    return load_csv(in, case_column, activity_column, order_column);
}

void save_csv(const EventLog& log, std::ostream& out) {
    out << "case,activity\n";
    std::uint64_t case_no = 0;
    for (const auto& [trace, count] : log.variants()) {
        for (std::uint64_t i = 0; i < count; ++i) {
            std::string case_id = "c" + std::to_string(case_no++);
            for (const auto& a : trace)
                out << case_id << "," << csv_quote(a) << "\n";
        }
    }
}

std::string render_trace(const Trace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ",";
        const Activity& a = t[i];
        if (a.find_first_of(",'() ") == std::string::npos) {
            out += a;
        } else {
            out += "'";
            for (char c : a) {
                out.push_back(c);
                if (c == '\'')
                    out.push_back('\'');
            }
            out += "'";
        }
    }
    return out;
}

} // namespace imr
