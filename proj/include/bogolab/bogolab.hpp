#pragma once

// Umbrella header: the whole laboratory in one include.

#include "bogolab/common.hpp"
#include "bogolab/errors.hpp"
#include "bogolab/tensor4.hpp"
#include "bogolab/model.hpp"
#include "bogolab/frame.hpp"
#include "bogolab/hartree.hpp"
#include "bogolab/bogoliubov.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/sparse.hpp"
#include "bogolab/fock_ops.hpp"
#include "bogolab/excitation.hpp"
#include "bogolab/residual.hpp"
#include "bogolab/harness.hpp"
#include "bogolab/serialize.hpp"
