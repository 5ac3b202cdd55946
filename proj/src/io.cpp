#include "multires/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <utility>

#include "json.hpp"
#include "multires/errors.hpp"
#include "multires/prox.hpp"

namespace multires {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
    const std::string::size_type b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const std::string::size_type e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const std::string::size_type pos = s.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// Splits into lines, tolerating CRLF endings and a trailing newline.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines = split(text, '\n');
    for (std::string& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

int parse_int_value(double v, const std::string& what) {
    if (!std::isfinite(v) || std::floor(v) != v || std::abs(v) > 2147483647.0) {
        throw ValidationError(what + " must be an integer, got " + format_double(v));
    }
    return static_cast<int>(v);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

void check_column_names(const std::vector<std::string>& names) {
    for (const std::string& name : names) {
        if (name.empty()) throw ValidationError("column names must be nonempty");
        if (name.find(',') != std::string::npos) {
            throw ValidationError("column name '" + name + "' contains a comma");
        }
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ValidationError("empty field where a number was expected");
    double v = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("cannot parse number '" + t + "'");
    }
    return v;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw ValidationError("cannot read file: " + path);
    return text;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw ValidationError("cannot write file: " + path);
}

std::vector<std::string> default_column_names(const std::string& prefix, int count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
    return names;
}

NamedMatrix read_matrix_csv(const std::string& path) {
    const std::vector<std::string> lines = split_lines(read_text_file(path));
    if (lines.empty()) throw ValidationError("empty file: " + path);

    NamedMatrix out;
    for (const std::string& name : split(lines[0], ',')) out.column_names.push_back(trim(name));
    check_column_names(out.column_names);

    const Eigen::Index cols = static_cast<Eigen::Index>(out.column_names.size());
    const Eigen::Index rows = static_cast<Eigen::Index>(lines.size()) - 1;
    if (rows == 0) throw ValidationError("no data rows in " + path);
    out.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::vector<std::string> fields = split(lines[static_cast<std::size_t>(i) + 1], ',');
        if (static_cast<Eigen::Index>(fields.size()) != cols) {
            throw ValidationError(path + " line " + std::to_string(i + 2) + ": expected " +
                                  std::to_string(cols) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            out.values(i, k) = parse_double(fields[static_cast<std::size_t>(k)]);
        }
    }
    return out;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& column_names) {
    if (static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
        throw ValidationError("write_matrix_csv: " + std::to_string(column_names.size()) +
                              " names for " + std::to_string(values.cols()) + " columns");
    }
    check_column_names(column_names);
    std::string text = join(column_names, ",");
    text += '\n';
    text.reserve(text.size() + static_cast<std::size_t>(values.size()) * 26);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index k = 0; k < values.cols(); ++k) {
            if (k > 0) text += ',';
            text += format_double(values(i, k));
        }
        text += '\n';
    }
    write_text_file(path, text);
}

DesignMatrix read_design_csv(const std::string& path, bool add_intercept,
                             std::vector<std::string>* predictor_names) {
    NamedMatrix m = read_matrix_csv(path);
    DesignMatrix x = add_intercept ? DesignMatrix::with_intercept(m.values)
                                   : DesignMatrix::without_intercept(m.values);
    x.validate();
    if (predictor_names) *predictor_names = std::move(m.column_names);
    return x;
}

void write_design_csv(const std::string& path, const DesignMatrix& x,
                      const std::vector<std::string>& predictor_names) {
    // The intercept column is a construction artifact; files carry predictors
    // only, so reading back with add_intercept reproduces the matrix.
    const Eigen::MatrixXd vals =
        x.has_intercept_column ? x.values.rightCols(x.p() - 1).eval() : x.values;
    const std::vector<std::string> names =
        predictor_names.empty() ? default_column_names("x", static_cast<int>(vals.cols()))
                                : predictor_names;
    write_matrix_csv(path, vals, names);
}

ResponseCounts read_response_csv(const std::string& path, int num_categories,
                                 std::vector<std::string>* category_names) {
    const NamedMatrix m = read_matrix_csv(path);
    ResponseCounts y;
    if (m.values.cols() == 1) {
        int max_label = 0;
        std::vector<int> labels(static_cast<std::size_t>(m.values.rows()));
        for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
            const int label = parse_int_value(m.values(i, 0),
                                              path + " line " + std::to_string(i + 2) + ": label");
            if (label < 1) {
                throw ValidationError(path + ": labels are 1-based, got " +
                                      std::to_string(label));
            }
            labels[static_cast<std::size_t>(i)] = label - 1;
            max_label = std::max(max_label, label);
        }
        const int k = num_categories > 0 ? num_categories : max_label;
        if (max_label > k) {
            throw ValidationError(path + ": label " + std::to_string(max_label) + " exceeds " +
                                  std::to_string(k) + " categories");
        }
        y = ResponseCounts::from_labels(labels, k);
        if (category_names) *category_names = default_column_names("c", k);
    } else {
        if (num_categories > 0 && m.values.cols() != num_categories) {
            throw ValidationError(path + ": expected " + std::to_string(num_categories) +
                                  " count columns, got " + std::to_string(m.values.cols()));
        }
        Eigen::MatrixXi counts(m.values.rows(), m.values.cols());
        for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
            for (Eigen::Index k = 0; k < m.values.cols(); ++k) {
                const int c = parse_int_value(m.values(i, k), path + " line " +
                                                                  std::to_string(i + 2) +
                                                                  ": count");
                if (c < 0) throw ValidationError(path + ": negative count");
                counts(i, k) = c;
            }
        }
        y = ResponseCounts::from_counts(counts);
        if (category_names) *category_names = m.column_names;
    }
    y.validate();
    return y;
}

void write_response_csv(const std::string& path, const ResponseCounts& y,
                        const std::vector<std::string>& category_names) {
    const std::vector<std::string> names =
        category_names.empty()
            ? default_column_names("c", static_cast<int>(y.num_categories()))
            : category_names;
    if (static_cast<Eigen::Index>(names.size()) != y.num_categories()) {
        throw ValidationError("write_response_csv: name count does not match categories");
    }
    check_column_names(names);
    std::string text = join(names, ",");
    text += '\n';
    for (Eigen::Index i = 0; i < y.n(); ++i) {
        for (Eigen::Index k = 0; k < y.num_categories(); ++k) {
            if (k > 0) text += ',';
            text += std::to_string(y.counts(i, k));
        }
        text += '\n';
    }
    write_text_file(path, text);
}

void write_labels_csv(const std::string& path, const ResponseCounts& y) {
    std::string text = "y\n";
    for (Eigen::Index i = 0; i < y.n(); ++i) {
        if (y.trials(i) != 1) {
            throw ValidationError("write_labels_csv: row " + std::to_string(i) +
                                  " is not single-trial");
        }
        for (Eigen::Index k = 0; k < y.num_categories(); ++k) {
            if (y.counts(i, k) == 1) {
                text += std::to_string(k + 1);
                break;
            }
        }
        text += '\n';
    }
    write_text_file(path, text);
}

namespace {

void check_spec_name(const std::string& name, const std::string& what) {
    if (name.empty()) throw ValidationError("group spec: empty " + what);
    if (name.find_first_of(",:#") != std::string::npos) {
        throw ValidationError("group spec: " + what + " '" + name +
                              "' contains a reserved character");
    }
}

}  // namespace

GroupSpecParse parse_group_spec(const std::string& text) {
    GroupSpecParse out;
    std::map<std::string, int> category_index;
    std::vector<std::vector<int>> groups;
    std::vector<double> weights;
    bool saw_categories = false;

    for (std::string line : split_lines(text)) {
        const std::string::size_type hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (!saw_categories) {
            if (line.rfind("categories:", 0) != 0) {
                throw ValidationError("group spec: expected a 'categories:' line first");
            }
            for (const std::string& raw : split(line.substr(11), ',')) {
                const std::string name = trim(raw);
                check_spec_name(name, "category name");
                if (!category_index.emplace(name, static_cast<int>(out.category_names.size()))
                         .second) {
                    throw ValidationError("group spec: duplicate category '" + name + "'");
                }
                out.category_names.push_back(name);
            }
            if (out.category_names.empty()) {
                throw ValidationError("group spec: no categories declared");
            }
            saw_categories = true;
            continue;
        }

        if (line.rfind("group ", 0) != 0) {
            throw ValidationError("group spec: cannot parse line '" + line + "'");
        }
        const std::string::size_type colon = line.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("group spec: missing ':' in '" + line + "'");
        }
        std::string head = trim(line.substr(6, colon - 6));
        double weight = 1.0;
        const std::string::size_type space = head.find_last_of(" \t");
        if (space != std::string::npos && head.compare(space + 1, 7, "weight=") == 0) {
            weight = parse_double(head.substr(space + 8));
            if (!(weight > 0.0)) {
                throw ValidationError("group spec: weight must be positive in '" + line + "'");
            }
            head = trim(head.substr(0, space));
        }
        check_spec_name(head, "group name");
        for (const std::string& existing : out.group_names) {
            if (existing == head) {
                throw ValidationError("group spec: duplicate group '" + head + "'");
            }
        }

        std::vector<int> members;
        for (const std::string& raw : split(line.substr(colon + 1), ',')) {
            const std::string name = trim(raw);
            check_spec_name(name, "category name");
            const auto it = category_index.find(name);
            if (it == category_index.end()) {
                throw ValidationError("group spec: unknown category '" + name + "' in group '" +
                                      head + "'");
            }
            if (std::find(members.begin(), members.end(), it->second) != members.end()) {
                throw ValidationError("group spec: category '" + name +
                                      "' listed twice in group '" + head + "'");
            }
            members.push_back(it->second);
        }
        if (members.size() < 2) {
            throw ValidationError("group spec: group '" + head + "' needs at least two members");
        }
        std::sort(members.begin(), members.end());
        out.group_names.push_back(head);
        groups.push_back(std::move(members));
        weights.push_back(weight);
    }

    if (!saw_categories) throw ValidationError("group spec: empty document");
    const int k = static_cast<int>(out.category_names.size());
    if (groups.empty()) {
        out.structure = CoarseStructure::none(k);
    } else {
        out.structure = CoarseStructure::make(
            std::move(groups), k,
            Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                              static_cast<Eigen::Index>(weights.size())));
    }
    return out;
}

std::string format_group_spec(const GroupSpecParse& spec) {
    if (static_cast<int>(spec.category_names.size()) != spec.structure.num_categories) {
        throw ValidationError("group spec: name count does not match categories");
    }
    if (static_cast<int>(spec.group_names.size()) != spec.structure.size()) {
        throw ValidationError("group spec: group name count does not match structure");
    }
    std::string text = "categories: " + join(spec.category_names, ", ") + "\n";
    for (int l = 0; l < spec.structure.size(); ++l) {
        text += "group " + spec.group_names[static_cast<std::size_t>(l)];
        if (spec.structure.weights(l) != 1.0) {
            text += " weight=" + format_double(spec.structure.weights(l));
        }
        text += ":";
        const std::vector<int>& members = spec.structure.groups[static_cast<std::size_t>(l)];
        for (std::size_t i = 0; i < members.size(); ++i) {
            text += i == 0 ? " " : ", ";
            text += spec.category_names[static_cast<std::size_t>(members[i])];
        }
        text += '\n';
    }
    return text;
}

GroupSpecParse read_group_spec(const std::string& path) {
    try {
        return parse_group_spec(read_text_file(path));
    } catch (const ValidationError& err) {
        throw ValidationError(path + ": " + err.what());
    }
}

const FitResult& ModelBundle::selected_fit() const {
    if (!has_selection()) throw ValidationError("model bundle: no selection recorded");
    const PathCell& c = path.cell(selected_gamma_index, selected_lambda_index);
    if (!c.ok) throw ValidationError("model bundle: selected cell failed: " + c.error);
    return c.result;
}

namespace {

std::string cell_file_name(int gamma_index, int lambda_index) {
    return "beta_g" + std::to_string(gamma_index) + "_l" + std::to_string(lambda_index) + ".csv";
}

}  // namespace

void save_model(const std::string& dir, const ModelBundle& bundle) {
    bundle.path.grid.validate();
    const int ng = bundle.path.grid.num_gammas();
    const int nl = bundle.path.grid.num_lambdas();
    if (static_cast<int>(bundle.path.cells.size()) != ng * nl) {
        throw ValidationError("save_model: cell count does not match the grid");
    }

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create directory " + dir + ": " + ec.message());

    json j;
    j["format"] = "multires-model";
    j["version"] = 1;
    j["has_intercept"] = bundle.has_intercept;
    j["num_categories"] = bundle.structure.num_categories;
    j["category_names"] = bundle.category_names;
    j["group_names"] = bundle.group_names;
    j["predictor_names"] = bundle.predictor_names;
    j["groups"] = bundle.structure.groups;
    std::vector<double> weights(bundle.structure.weights.data(),
                                bundle.structure.weights.data() + bundle.structure.weights.size());
    j["group_weights"] = weights;
    j["gammas"] = bundle.path.grid.gammas;
    j["lambdas"] = bundle.path.grid.lambdas;
    if (bundle.has_selection()) {
        j["selected"] = {{"gamma_index", bundle.selected_gamma_index},
                         {"lambda_index", bundle.selected_lambda_index}};
    }

    std::vector<int> penalized_rows;
    json cells = json::array();
    for (const PathCell& cell : bundle.path.cells) {
        json c;
        c["gamma_index"] = cell.gamma_index;
        c["lambda_index"] = cell.lambda_index;
        c["gamma"] = cell.gamma;
        c["lambda"] = cell.lambda;
        c["ok"] = cell.ok;
        if (cell.ok) {
            if (penalized_rows.empty()) penalized_rows = cell.result.beta.penalized_rows;
            c["iterations"] = cell.result.iterations;
            c["converged"] = cell.result.converged;
            c["kkt_residual"] = cell.result.kkt_residual;
            c["objective"] = cell.result.objective();
            c["prox_nonconverged"] = cell.result.prox_nonconverged;
            const std::string file = cell_file_name(cell.gamma_index, cell.lambda_index);
            c["file"] = file;
            const std::vector<std::string> header =
                bundle.category_names.empty()
                    ? default_column_names(
                          "c", static_cast<int>(cell.result.beta.num_categories()))
                    : bundle.category_names;
            write_matrix_csv((fs::path(dir) / file).string(), cell.result.beta.values, header);
        } else {
            c["error"] = cell.error;
        }
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    j["penalized_rows"] = penalized_rows;

    write_text_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

ModelBundle load_model(const std::string& dir) {
    json j;
    try {
        j = json::parse(read_text_file((fs::path(dir) / "manifest.json").string()));
    } catch (const json::exception& err) {
        throw ValidationError(dir + "/manifest.json: " + err.what());
    }

    try {
        if (j.at("format").get<std::string>() != "multires-model") {
            throw ValidationError(dir + ": not a model bundle");
        }
        ModelBundle bundle;
        bundle.has_intercept = j.at("has_intercept").get<bool>();
        bundle.category_names = j.at("category_names").get<std::vector<std::string>>();
        bundle.group_names = j.at("group_names").get<std::vector<std::string>>();
        bundle.predictor_names = j.at("predictor_names").get<std::vector<std::string>>();

        const int k = j.at("num_categories").get<int>();
        auto groups = j.at("groups").get<std::vector<std::vector<int>>>();
        const auto weights = j.at("group_weights").get<std::vector<double>>();
        if (groups.empty()) {
            bundle.structure = CoarseStructure::none(k);
        } else {
            bundle.structure = CoarseStructure::make(
                std::move(groups), k,
                Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                  static_cast<Eigen::Index>(weights.size())));
        }

        bundle.path.grid.gammas = j.at("gammas").get<std::vector<double>>();
        bundle.path.grid.lambdas = j.at("lambdas").get<std::vector<double>>();
        bundle.path.grid.validate();
        const int ng = bundle.path.grid.num_gammas();
        const int nl = bundle.path.grid.num_lambdas();

        const auto penalized_rows = j.at("penalized_rows").get<std::vector<int>>();
        const json& cells = j.at("cells");
        if (static_cast<int>(cells.size()) != ng * nl) {
            throw ValidationError(dir + ": manifest lists " + std::to_string(cells.size()) +
                                  " cells for a " + std::to_string(ng) + "x" +
                                  std::to_string(nl) + " grid");
        }
        bundle.path.cells.resize(static_cast<std::size_t>(ng * nl));
        std::vector<char> seen(static_cast<std::size_t>(ng * nl), 0);
        for (const json& c : cells) {
            PathCell cell;
            cell.gamma_index = c.at("gamma_index").get<int>();
            cell.lambda_index = c.at("lambda_index").get<int>();
            if (cell.gamma_index < 0 || cell.gamma_index >= ng || cell.lambda_index < 0 ||
                cell.lambda_index >= nl) {
                throw ValidationError(dir + ": cell index out of range");
            }
            cell.gamma = c.at("gamma").get<double>();
            cell.lambda = c.at("lambda").get<double>();
            cell.ok = c.at("ok").get<bool>();
            if (cell.ok) {
                const std::string file = c.at("file").get<std::string>();
                const NamedMatrix m = read_matrix_csv((fs::path(dir) / file).string());
                cell.result.beta.values = m.values;
                cell.result.beta.penalized_rows = penalized_rows;
                cell.result.beta.validate();
                cell.result.objective_trace = {c.at("objective").get<double>()};
                cell.result.iterations = c.at("iterations").get<int>();
                cell.result.converged = c.at("converged").get<bool>();
                cell.result.kkt_residual = c.at("kkt_residual").get<double>();
                cell.result.prox_nonconverged = c.at("prox_nonconverged").get<int>();
                cell.result.gamma = cell.gamma;
                cell.result.lambda = cell.lambda;
            } else {
                cell.error = c.at("error").get<std::string>();
            }
            const std::size_t idx =
                static_cast<std::size_t>(cell.gamma_index * nl + cell.lambda_index);
            if (seen[idx]) throw ValidationError(dir + ": duplicate cell in manifest");
            seen[idx] = 1;
            bundle.path.cells[idx] = std::move(cell);
        }

        if (j.contains("selected")) {
            bundle.selected_gamma_index = j.at("selected").at("gamma_index").get<int>();
            bundle.selected_lambda_index = j.at("selected").at("lambda_index").get<int>();
            if (bundle.selected_gamma_index < 0 || bundle.selected_gamma_index >= ng ||
                bundle.selected_lambda_index < 0 || bundle.selected_lambda_index >= nl) {
                throw ValidationError(dir + ": selected cell out of range");
            }
        }
        return bundle;
    } catch (const json::exception& err) {
        throw ValidationError(dir + "/manifest.json: " + err.what());
    }
}

ResolutionReport resolution_report(const CoefficientMatrix& beta, const CoarseStructure& s) {
    beta.validate();
    if (beta.num_categories() != s.num_categories) {
        throw ValidationError("resolution_report: structure is for " +
                              std::to_string(s.num_categories) + " categories, beta has " +
                              std::to_string(beta.num_categories()));
    }
    std::vector<char> penalized(static_cast<std::size_t>(beta.p()), 0);
    for (const int r : beta.penalized_rows) penalized[static_cast<std::size_t>(r)] = 1;

    ResolutionReport report;
    report.rows.reserve(static_cast<std::size_t>(beta.p()));
    for (Eigen::Index jj = 0; jj < beta.p(); ++jj) {
        RowResolution row;
        row.row = static_cast<int>(jj);
        row.penalized = penalized[static_cast<std::size_t>(jj)] != 0;
        const Eigen::VectorXd v = beta.values.row(jj).transpose();
        row.irrelevant = row.penalized && v.isZero(0.0);
        row.groups.resize(static_cast<std::size_t>(s.size()));
        for (int l = 0; l < s.size(); ++l) {
            GroupResolution& g = row.groups[static_cast<std::size_t>(l)];
            const std::vector<int>& idx = s.groups[static_cast<std::size_t>(l)];
            g.collapsed = is_constant_on(v, idx);
            if (g.collapsed) g.value = v(idx[0]);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string format_resolution_report(const ResolutionReport& report,
                                     const std::vector<std::string>& predictor_names,
                                     const std::vector<std::string>& group_names) {
    const std::size_t n_groups = report.rows.empty() ? 0 : report.rows[0].groups.size();
    if (!predictor_names.empty() && predictor_names.size() != report.rows.size()) {
        throw ValidationError("resolution report: predictor name count mismatch");
    }
    if (!group_names.empty() && group_names.size() != n_groups) {
        throw ValidationError("resolution report: group name count mismatch");
    }

    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header = {"predictor", "status"};
    for (std::size_t l = 0; l < n_groups; ++l) {
        header.push_back(group_names.empty() ? "A" + std::to_string(l + 1) : group_names[l]);
    }
    table.push_back(std::move(header));

    char buf[32];
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const RowResolution& row = report.rows[i];
        std::vector<std::string> line;
        line.push_back(predictor_names.empty() ? "row" + std::to_string(row.row + 1)
                                               : predictor_names[i]);
        line.push_back(row.irrelevant ? "irrelevant" : "active");
        for (const GroupResolution& g : row.groups) {
            if (g.collapsed) {
                std::snprintf(buf, sizeof buf, "= %.6g", g.value);
                line.push_back(buf);
            } else {
                line.push_back("fine");
            }
        }
        table.push_back(std::move(line));
    }

    std::vector<std::size_t> widths(table[0].size(), 0);
    for (const std::vector<std::string>& line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            widths[i] = std::max(widths[i], line[i].size());
        }
    }
    std::string text;
    for (const std::vector<std::string>& line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            text += line[i];
            if (i + 1 < line.size()) {
                text.append(widths[i] - line[i].size() + 2, ' ');
            }
        }
        text += '\n';
    }
    return text;
}

std::string format_bench_rows(const std::vector<BenchRow>& rows) {
    std::string text =
        "model\tp\trep\tmethod\thellinger\tkl_divergence\tclassification_error\tdeviance\tdof"
        "\tgamma\tlambda\tcollapsed_recovered\tirrelevant_recovered\tseconds\n";
    for (const BenchRow& r : rows) {
        text += std::to_string(r.model_id) + '\t' + std::to_string(r.p) + '\t' +
                std::to_string(r.rep) + '\t' + r.method + '\t' + format_double(r.hellinger) +
                '\t' + format_double(r.kl_divergence) + '\t' +
                format_double(r.classification_error) + '\t' + format_double(r.deviance) + '\t' +
                std::to_string(r.degrees_of_freedom) + '\t' + format_double(r.gamma) + '\t' +
                format_double(r.lambda) + '\t' + format_double(r.collapsed_recovered) + '\t' +
                format_double(r.irrelevant_recovered) + '\t' + format_double(r.seconds) + '\n';
    }
    return text;
}

std::string format_bench_summary(const std::vector<BenchSummaryRow>& rows) {
    std::string text =
        "model\tmethod\treps\thellinger\tkl_divergence\tclassification_error\tdeviance\tdof"
        "\tcollapsed_recovered\tirrelevant_recovered\n";
    for (const BenchSummaryRow& r : rows) {
        text += std::to_string(r.model_id) + '\t' + r.method + '\t' + std::to_string(r.reps) +
                '\t' + format_double(r.hellinger) + '\t' + format_double(r.kl_divergence) + '\t' +
                format_double(r.classification_error) + '\t' + format_double(r.deviance) + '\t' +
                format_double(r.degrees_of_freedom) + '\t' +
                format_double(r.collapsed_recovered) + '\t' +
                format_double(r.irrelevant_recovered) + '\n';
    }
    return text;
}

}  // namespace multires
