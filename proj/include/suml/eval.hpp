#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suml/data.hpp"
#include "suml/model.hpp"
#include "suml/trainer.hpp"

namespace suml {

// Exact-count accuracy; formatting to percent happens only at the edges.
struct SubsetCounts {
    std::size_t correct = 0;
    std::size_t total = 0;

    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }

    bool operator==(const SubsetCounts&) const = default;
};

struct PredictionRecord {
    std::string id;
    int predicted = 0;
    bool correct = false;
    SubsetTag tag = SubsetTag::Unknown;

    bool operator==(const PredictionRecord&) const = default;
};

struct EvalReport {
    std::string dataset_name;
    std::string model_id;
    std::uint64_t seed = 0;
    std::vector<PredictionRecord> per_instance;
    SubsetCounts easy;
    SubsetCounts hard;
    SubsetCounts unknown;   // contributes to overall only
    SubsetCounts overall;

    bool operator==(const EvalReport&) const = default;
};

// Argmax prediction (ties -> lowest index) with the checkpoint's best params.
EvalReport evaluate(const Checkpoint& checkpoint, const Dataset& dataset, EncodeMode mode);

struct ColumnStat {
    double mean = 0.0;
    double stddev = 0.0;   // population sigma over seeds
    std::size_t n = 0;     // reports with a nonempty subset; 0 renders as "-"

    bool operator==(const ColumnStat&) const = default;
};

struct ComparisonRow {
    std::string model;
    std::string data;
    ColumnStat easy;
    ColumnStat hard;
    ColumnStat overall;
    std::size_t n_reports = 0;

    bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;  // grouped by (model, data), first-appearance order

    bool operator==(const ComparisonTable&) const = default;
};

ComparisonTable compare(const std::vector<EvalReport>& reports);

enum class ReportFormat { PlainTable, RecordLines };

ReportFormat report_format_from_name(const std::string& name);

// PlainTable: fixed columns model, data, easy, hard, overall (one-decimal
// percent, mean+sigma). RecordLines: one JSON object per row; round-trips
// through parse_table_records.
std::string emit_report(const ComparisonTable& table, ReportFormat format);

ComparisonTable parse_table_records(const std::string& text);

}  // namespace suml
