#pragma once

#include <iosfwd>
#include <string>

#include "qhi/quantum.hpp"
#include "qhi/state_tomography.hpp"

namespace qhi {

// Matrix text format: one header line "rows cols", then row-major lines of
// "re im" pairs separated by spaces, 17 significant digits (full double
// round trip).
void write_matrix(std::ostream& os, const ComplexMatrix& A);
ComplexMatrix read_matrix(std::istream& is);

void write_matrix_file(const std::string& path, const ComplexMatrix& A);
ComplexMatrix read_matrix_file(const std::string& path);

// Hamiltonian file: the matrix format plus an optional trailing line
// "h1 <value>" carrying the gauge anchor.
void write_hamiltonian_file(const std::string& path, const Hamiltonian& H);
Hamiltonian read_hamiltonian_file(const std::string& path);

// Counts dump, CSV columns: setting_index, outcome_index, count.
void write_counts_csv(const std::string& path, const ShotCounts& counts);

}  // namespace qhi
