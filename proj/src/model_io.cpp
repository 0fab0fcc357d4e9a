#include "logens/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace logens {

namespace {

std::ofstream open_model_out(const std::string& path, const char* kind) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "logens-model " << kModelFormatVersion << ' ' << kind << '\n';
    return out;
}

std::ifstream open_model_in(const std::string& path, const char* kind) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open model: " + path);
    std::string magic, found_kind;
    int version = 0;
    in >> magic >> version >> found_kind;
    if (magic != "logens-model" || version != kModelFormatVersion || found_kind != kind)
        throw input_error(path + ": expected logens-model " +
                          std::to_string(kModelFormatVersion) + " " + kind);
    return in;
}

void expect_tag(std::istream& in, const char* tag, const std::string& path) {
    std::string got;
    in >> got;
    if (got != tag) throw input_error(path + ": expected field '" + std::string(tag) + "'");
}

}  // namespace

void save_knn(const KnnModel& m, const std::string& path) {
    std::ofstream out = open_model_out(path, "knn");
    out << "k " << m.k << '\n';
    out << "points " << m.points.rows() << ' ' << m.points.cols() << '\n';
    for (Eigen::Index i = 0; i < m.points.rows(); ++i) {
        out << m.labels[i];
        for (Eigen::Index j = 0; j < m.points.cols(); ++j) out << ' ' << m.points(i, j);
        out << '\n';
    }
}

KnnModel load_knn(const std::string& path) {
    std::ifstream in = open_model_in(path, "knn");
    KnnModel m;
    Eigen::Index rows = 0, cols = 0;
    expect_tag(in, "k", path);
    in >> m.k;
    expect_tag(in, "points", path);
    in >> rows >> cols;
    if (!in || rows < 1 || cols < 1) throw input_error(path + ": bad knn dimensions");
    m.points.resize(rows, cols);
    m.labels.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        in >> m.labels[i];
        for (Eigen::Index j = 0; j < cols; ++j) in >> m.points(i, j);
    }
    if (!in) throw input_error(path + ": truncated knn model");
    return m;
}

void save_dt(const TreeModel& m, const std::string& path) {
    std::ofstream out = open_model_out(path, "dt");
    out << "min_samples_split " << m.min_samples_split << '\n';
    out << "max_depth " << (m.max_depth ? std::to_string(*m.max_depth) : "none") << '\n';
    out << "nodes " << m.nodes.size() << '\n';
    for (const TreeNode& n : m.nodes) {
        if (n.is_leaf)
            out << "leaf " << label_to_int(n.leaf_label) << '\n';
        else
            out << "split " << n.feature << ' ' << n.threshold << ' ' << n.left << ' '
                << n.right << '\n';
    }
}

TreeModel load_dt(const std::string& path) {
    std::ifstream in = open_model_in(path, "dt");
    TreeModel m;
    expect_tag(in, "min_samples_split", path);
    in >> m.min_samples_split;
    expect_tag(in, "max_depth", path);
    std::string depth;
    in >> depth;
    if (depth != "none") m.max_depth = std::stoi(depth);
    expect_tag(in, "nodes", path);
    std::size_t count = 0;
    in >> count;
    for (std::size_t i = 0; i < count; ++i) {
        std::string kind;
        in >> kind;
        TreeNode n;
        if (kind == "leaf") {
            int l;
            in >> l;
            n.leaf_label = label_from_int(l);
        } else if (kind == "split") {
            n.is_leaf = false;
            in >> n.feature >> n.threshold >> n.left >> n.right;
        } else {
            throw input_error(path + ": unknown node kind '" + kind + "'");
        }
        m.nodes.push_back(n);
    }
    if (!in || m.nodes.size() != count) throw input_error(path + ": truncated dt model");
    return m;
}

namespace {

void write_matrix(std::ostream& out, const char* tag, const Eigen::MatrixXd& m) {
    out << tag << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << m(i, j);
        }
        out << '\n';
    }
}

void read_matrix(std::istream& in, const char* tag, Eigen::MatrixXd& m,
                 Eigen::Index rows, Eigen::Index cols, const std::string& path) {
    expect_tag(in, tag, path);
    m.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) in >> m(i, j);
}

}  // namespace

void save_slfn(const SlfnModel& m, const std::string& path) {
    std::ofstream out = open_model_out(path, "slfn");
    out << "input " << m.w1.cols() << '\n';
    out << "hidden " << m.w1.rows() << '\n';
    write_matrix(out, "w1", m.w1);
    write_matrix(out, "b1", m.b1.transpose());
    write_matrix(out, "w2", m.w2);
    write_matrix(out, "b2", m.b2.transpose());
}

SlfnModel load_slfn(const std::string& path) {
    std::ifstream in = open_model_in(path, "slfn");
    Eigen::Index input = 0, hidden = 0;
    expect_tag(in, "input", path);
    in >> input;
    expect_tag(in, "hidden", path);
    in >> hidden;
    if (!in || input < 1 || hidden < 1) throw input_error(path + ": bad slfn dimensions");

    SlfnModel m;
    Eigen::MatrixXd tmp;
    read_matrix(in, "w1", m.w1, hidden, input, path);
    read_matrix(in, "b1", tmp, 1, hidden, path);
    m.b1 = tmp.row(0).transpose();
    read_matrix(in, "w2", m.w2, 2, hidden, path);
    read_matrix(in, "b2", tmp, 1, 2, path);
    m.b2 = tmp.row(0).transpose();
    if (!in) throw input_error(path + ": truncated slfn model");
    return m;
}

}  // namespace logens
