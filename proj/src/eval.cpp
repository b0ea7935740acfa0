#include "suml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "suml/serialize.hpp"

namespace suml {

namespace {

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

ColumnStat column_stat(const std::vector<double>& values) {
    ColumnStat stat;
    stat.n = values.size();
    if (values.empty()) return stat;
    for (double v : values) stat.mean += v;
    stat.mean /= static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - stat.mean) * (v - stat.mean);
    stat.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return stat;
}

std::string format_percent(const ColumnStat& stat) {
    if (stat.n == 0) return "-";
    std::ostringstream out;
    out << std::fixed << std::setprecision(1) << 100.0 * stat.mean << " +- "
        << std::setprecision(1) << 100.0 * stat.stddev;
    return out.str();
}

}  // namespace

EvalReport evaluate(const Checkpoint& checkpoint, const Dataset& dataset, EncodeMode mode) {
    EvalReport report;
    report.dataset_name = dataset.name;
    report.model_id = checkpoint.kind;
    report.seed = checkpoint.config.seed;
    report.per_instance.reserve(dataset.size());
    for (const Instance& instance : dataset.instances) {
        auto logits = score_choices(checkpoint.model(), checkpoint.vocab, instance, mode);
        PredictionRecord record;
        record.id = instance.id;
        record.predicted = argmax_lowest(logits);
        record.correct = record.predicted == instance.label;
        record.tag = instance.tag_or_unknown();
        SubsetCounts& bucket = record.tag == SubsetTag::Easy   ? report.easy
                               : record.tag == SubsetTag::Hard ? report.hard
                                                               : report.unknown;
        ++bucket.total;
        ++report.overall.total;
        if (record.correct) {
            ++bucket.correct;
            ++report.overall.correct;
        }
        report.per_instance.push_back(std::move(record));
    }
    return report;
}

ComparisonTable compare(const std::vector<EvalReport>& reports) {
    struct Group {
        std::string model;
        std::string data;
        std::vector<double> easy, hard, overall;
        std::size_t n_reports = 0;
    };
    std::vector<Group> groups;
    for (const EvalReport& report : reports) {
        Group* group = nullptr;
        for (Group& g : groups)
            if (g.model == report.model_id && g.data == report.dataset_name) {
                group = &g;
                break;
            }
        if (!group) {
            groups.push_back(Group{report.model_id, report.dataset_name, {}, {}, {}, 0});
            group = &groups.back();
        }
        ++group->n_reports;
        if (report.easy.total > 0) group->easy.push_back(report.easy.accuracy());
        if (report.hard.total > 0) group->hard.push_back(report.hard.accuracy());
        if (report.overall.total > 0) group->overall.push_back(report.overall.accuracy());
    }
    ComparisonTable table;
    for (const Group& g : groups) {
        ComparisonRow row;
        row.model = g.model;
        row.data = g.data;
        row.easy = column_stat(g.easy);
        row.hard = column_stat(g.hard);
        row.overall = column_stat(g.overall);
        row.n_reports = g.n_reports;
        table.rows.push_back(std::move(row));
    }
    return table;
}

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "table") return ReportFormat::PlainTable;
    if (name == "records") return ReportFormat::RecordLines;
    throw std::invalid_argument("unknown report format \"" + name + "\" (expected table or records)");
}

namespace {

Json column_to_json(const ColumnStat& stat) {
    Json j = Json::object();
    j["mean"] = stat.mean;
    j["stddev"] = stat.stddev;
    j["n"] = stat.n;
    return j;
}

ColumnStat column_from_json(const Json& j) {
    ColumnStat stat;
    stat.mean = j.at("mean").get<double>();
    stat.stddev = j.at("stddev").get<double>();
    stat.n = j.at("n").get<std::size_t>();
    return stat;
}

}  // namespace

std::string emit_report(const ComparisonTable& table, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::RecordLines) {
        for (const ComparisonRow& row : table.rows) {
            Json j = Json::object();
            j["model"] = row.model;
            j["data"] = row.data;
            j["easy"] = column_to_json(row.easy);
            j["hard"] = column_to_json(row.hard);
            j["overall"] = column_to_json(row.overall);
            j["n_reports"] = row.n_reports;
            out << j.dump() << '\n';
        }
        return out.str();
    }
    std::size_t model_w = 5, data_w = 4;
    for (const ComparisonRow& row : table.rows) {
        model_w = std::max(model_w, row.model.size());
        data_w = std::max(data_w, row.data.size());
    }
    auto cell = [&](const std::string& text, std::size_t width) {
        out << std::left << std::setw(static_cast<int>(width) + 2) << text;
    };
    cell("model", model_w);
    cell("data", data_w);
    cell("easy", 12);
    cell("hard", 12);
    cell("overall", 12);
    out << "n\n";
    for (const ComparisonRow& row : table.rows) {
        cell(row.model, model_w);
        cell(row.data, data_w);
        cell(format_percent(row.easy), 12);
        cell(format_percent(row.hard), 12);
        cell(format_percent(row.overall), 12);
        out << row.n_reports << '\n';
    }
    return out.str();
}

ComparisonTable parse_table_records(const std::string& text) {
    ComparisonTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw std::runtime_error("record line " + std::to_string(line_no) + ": " + e.what());
        }
        ComparisonRow row;
        row.model = j.at("model").get<std::string>();
        row.data = j.at("data").get<std::string>();
        row.easy = column_from_json(j.at("easy"));
        row.hard = column_from_json(j.at("hard"));
        row.overall = column_from_json(j.at("overall"));
        row.n_reports = j.at("n_reports").get<std::size_t>();
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace suml
