#include "eulsolve/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eulsolve {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void format_value(char* buf, std::size_t cap, double v) {
    std::snprintf(buf, cap, "%.17g", v);
}

}  // namespace

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("empty file: " + path);
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw UsageError("not a Matrix Market file: " + path);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "coordinate") throw UsageError("expected coordinate format: " + path);
    if (field != "real" && field != "integer")
        throw UsageError("expected real matrix: " + path);

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sz(line);
    int rows = 0, cols = 0;
    long long nnz = 0;
    sz >> rows >> cols >> nnz;
    if (!sz) throw UsageError("bad size line in " + path);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        int i, j;
        double v;
        if (!(in >> i >> j >> v)) throw UsageError("truncated entries in " + path);
        t.push_back({i - 1, j - 1, v});
        if (symmetry == "symmetric" && i != j) t.push_back({j - 1, i - 1, v});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void write_matrix_market(const std::string& path, const SparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    char buf[40];
    // CSR iteration is already (row, col) sorted.
    for (int i = 0; i < m.rows(); ++i) {
        auto cs = m.row_cols(i);
        auto vs = m.row_vals(i);
        for (std::size_t p = 0; p < cs.size(); ++p) {
            format_value(buf, sizeof buf, vs[p]);
            out << (i + 1) << ' ' << (cs[p] + 1) << ' ' << buf << '\n';
        }
    }
    if (!out) throw UsageError("write failed: " + path);
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::string first;
    if (!std::getline(in, first)) throw UsageError("empty vector file: " + path);
    if (first.rfind("%%MatrixMarket", 0) == 0) {
        std::istringstream hdr(first);
        std::string banner, object, format;
        hdr >> banner >> object >> format;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '%') break;
        std::istringstream sz(line);
        int rows = 0, cols = 0;
        if (lower(format) == "array") {
            sz >> rows >> cols;
            if (cols != 1) throw UsageError("vector file must have one column: " + path);
            std::vector<double> v(rows);
            for (int i = 0; i < rows; ++i)
                if (!(in >> v[i])) throw UsageError("truncated vector in " + path);
            return v;
        }
        long long nnz = 0;
        sz >> rows >> cols >> nnz;
        if (cols != 1) throw UsageError("vector file must have one column: " + path);
        std::vector<double> v(rows, 0.0);
        for (long long k = 0; k < nnz; ++k) {
            int i, j;
            double x;
            if (!(in >> i >> j >> x)) throw UsageError("truncated vector in " + path);
            v[i - 1] = x;
        }
        return v;
    }
    // Plain newline floats.
    std::vector<double> v;
    std::istringstream ss(first);
    double x;
    while (ss >> x) v.push_back(x);
    while (in >> x) v.push_back(x);
    return v;
}

void write_vector(const std::string& path, std::span<const double> v) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    char buf[40];
    for (double x : v) {
        format_value(buf, sizeof buf, x);
        out << buf << '\n';
    }
    if (!out) throw UsageError("write failed: " + path);
}

void write_dense_matrix_market(const std::string& path, int rows, int cols,
                               std::span<const double> row_major) {
    if (static_cast<int>(row_major.size()) != rows * cols)
        throw InvalidInput("dense buffer size mismatch");
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << rows << ' ' << cols << '\n';
    char buf[40];
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            format_value(buf, sizeof buf, row_major[static_cast<std::size_t>(i) * cols + j]);
            out << buf << '\n';
        }
    if (!out) throw UsageError("write failed: " + path);
}

std::vector<double> read_dense_matrix_market(const std::string& path, int& rows, int& cols) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw UsageError("not a Matrix Market file: " + path);
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%') break;
    std::istringstream sz(line);
    sz >> rows >> cols;
    if (!sz) throw UsageError("bad size line in " + path);
    std::vector<double> a(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            if (!(in >> a[static_cast<std::size_t>(i) * cols + j]))
                throw UsageError("truncated entries in " + path);
    return a;
}

}  // namespace eulsolve
