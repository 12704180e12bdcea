#include "qhi/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace qhi {

void write_matrix(std::ostream& os, const ComplexMatrix& A) {
    os << A.rows() << " " << A.cols() << "\n";
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (j > 0) os << " ";
            os << A(i, j).real() << " " << A(i, j).imag();
        }
        os << "\n";
    }
}

ComplexMatrix read_matrix(std::istream& is) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(is >> rows >> cols) || rows < 1 || cols < 1) {
        throw ConfigError("read_matrix: bad header line");
    }
    ComplexMatrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            double re = 0.0;
            double im = 0.0;
            if (!(is >> re >> im)) {
                throw ConfigError("read_matrix: truncated matrix body");
            }
            A(i, j) = Complex(re, im);
        }
    }
    return A;
}

void write_matrix_file(const std::string& path, const ComplexMatrix& A) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_matrix(os, A);
}

ComplexMatrix read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    return read_matrix(is);
}

void write_hamiltonian_file(const std::string& path, const Hamiltonian& H) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_matrix(os, H.matrix);
    if (H.h1_anchor) {
        os << "h1 " << std::setprecision(17) << *H.h1_anchor << "\n";
    }
}

Hamiltonian read_hamiltonian_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    ComplexMatrix m = read_matrix(is);
    std::optional<double> h1;
    std::string tag;
    if (is >> tag) {
        double value = 0.0;
        if (tag != "h1" || !(is >> value)) {
            throw ConfigError("read_hamiltonian_file: malformed trailing line in " + path);
        }
        h1 = value;
    }
    try {
        return Hamiltonian(std::move(m), h1);
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("read_hamiltonian_file: ") + e.what());
    }
}

void write_counts_csv(const std::string& path, const ShotCounts& counts) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << "setting_index,outcome_index,count\n";
    for (std::size_t s = 0; s < counts.counts.size(); ++s) {
        for (std::size_t o = 0; o < counts.counts[s].size(); ++o) {
            os << s << "," << o << "," << counts.counts[s][o] << "\n";
        }
    }
}

}  // namespace qhi
