// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 WSDPA Project Contributors

#pragma once

#include <string>
#include <vector>

#include "wsdpa/hogsvd.hpp"
#include "wsdpa/selection.hpp"

namespace wsdpa {

/// Everything an analysis subcommand needs to run without redoing the
/// decomposition. tensor carries metadata (perm, m, layout, scaling, names);
/// its class matrices are not persisted.
struct StoredRun {
    HogsvdFactors factors;
    DatasetTensor tensor;
    std::vector<Eigen::MatrixXd> raw_stacks; // pre-scaling, n_i x m_full
    std::string basis_name;
};

/// Little-endian binary container, magic "WSDPA1": dimensions, then the raw
/// 64-bit float arrays V, U_i, sigma_i and the selection permutation,
/// followed by the scaling record, layout, names, and raw coefficient stacks.
void save_run(const StoredRun& run, const std::string& path);
StoredRun load_run(const std::string& path);

} // namespace wsdpa
