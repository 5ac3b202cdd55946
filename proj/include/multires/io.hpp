#pragma once

#include <string>
#include <vector>

#include "multires/bench.hpp"
#include "multires/selection.hpp"

namespace multires {

// All tabular files are comma-separated text with one header row of column
// names. Numbers are written with 17 significant digits so that a write/read
// round trip reproduces every double bit-exactly.

struct NamedMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;
};

NamedMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& column_names);

// "x1".."xn" style names.
std::vector<std::string> default_column_names(const std::string& prefix, int count);

// Reads a predictor matrix, optionally prepending an intercept column. When
// predictor_names is given it receives the header (without an intercept
// entry).
DesignMatrix read_design_csv(const std::string& path, bool add_intercept,
                             std::vector<std::string>* predictor_names = nullptr);
void write_design_csv(const std::string& path, const DesignMatrix& x,
                      const std::vector<std::string>& predictor_names = {});

// A response file is either a single column of 1-based class labels
// (converted to single-trial counts) or an n x K count matrix. The column
// count decides. num_categories = 0 infers K from the data (max label /
// column count); category_names receives the header in the count form.
ResponseCounts read_response_csv(const std::string& path, int num_categories = 0,
                                 std::vector<std::string>* category_names = nullptr);
void write_response_csv(const std::string& path, const ResponseCounts& y,
                        const std::vector<std::string>& category_names = {});
// Single-trial responses as one 1-based "y" column.
void write_labels_csv(const std::string& path, const ResponseCounts& y);

// Group specification document. Grammar, one directive per line:
//
//   # comment (also allowed after a directive)
//   categories: <name>, <name>, ...
//   group <name>: <member>, <member>, ...
//   group <name> weight=<positive real>: <member>, ...
//
// The categories line comes first and lists all K fine categories. Names are
// trimmed of surrounding whitespace and may contain internal spaces; they may
// not contain commas, colons, or '#'. Each group needs at least two distinct
// members, all drawn from the declared categories; group names must be
// unique. Groups may overlap. Weights default to 1.
struct GroupSpecParse {
    CoarseStructure structure;
    std::vector<std::string> category_names;
    std::vector<std::string> group_names;
};

GroupSpecParse parse_group_spec(const std::string& text);
std::string format_group_spec(const GroupSpecParse& spec);
GroupSpecParse read_group_spec(const std::string& path);

// A fitted path saved as a directory: manifest.json with the grid, the
// structure, names, and per-cell diagnostics, plus one coefficient CSV per
// successful cell (beta_g<i>_l<j>.csv).
struct ModelBundle {
    FitPath path;
    CoarseStructure structure;
    std::vector<std::string> category_names;  // may be empty
    std::vector<std::string> group_names;
    std::vector<std::string> predictor_names;  // per beta row, intercept included
    bool has_intercept = true;
    int selected_gamma_index = -1;  // -1 when no selection was recorded
    int selected_lambda_index = -1;

    bool has_selection() const { return selected_gamma_index >= 0 && selected_lambda_index >= 0; }
    const FitResult& selected_fit() const;
};

void save_model(const std::string& dir, const ModelBundle& bundle);
ModelBundle load_model(const std::string& dir);

// Effect-resolution summary of one coefficient matrix. A penalized row is
// irrelevant when it is exactly zero; a (row, group) pair is collapsed when
// the entries are exactly equal (shared values are written exactly, so no
// tolerance is involved).
struct GroupResolution {
    bool collapsed = false;
    double value = 0.0;  // the shared constant when collapsed
};

struct RowResolution {
    int row = 0;
    bool penalized = true;
    bool irrelevant = false;  // penalized rows only
    std::vector<GroupResolution> groups;
};

struct ResolutionReport {
    std::vector<RowResolution> rows;
};

ResolutionReport resolution_report(const CoefficientMatrix& beta, const CoarseStructure& s);

// Fixed-width text table: one line per row (named when names are given),
// status column, then one collapsed(value)/fine entry per group.
std::string format_resolution_report(const ResolutionReport& report,
                                     const std::vector<std::string>& predictor_names = {},
                                     const std::vector<std::string>& group_names = {});

// Tab-separated tables with a header row, one line per entry.
std::string format_bench_rows(const std::vector<BenchRow>& rows);
std::string format_bench_summary(const std::vector<BenchSummaryRow>& rows);

// Helpers shared by the CLI.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string format_double(double v);          // %.17g
double parse_double(const std::string& text);  // full-token parse or ValidationError

}  // namespace multires
