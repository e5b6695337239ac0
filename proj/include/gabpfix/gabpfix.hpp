#ifndef GABPFIX_GABPFIX_HPP
#define GABPFIX_GABPFIX_HPP

#include "gabpfix/cdma.hpp"
#include "gabpfix/error.hpp"
#include "gabpfix/experiments.hpp"
#include "gabpfix/gabp.hpp"
#include "gabpfix/least_squares.hpp"
#include "gabpfix/loading.hpp"
#include "gabpfix/matrix_market.hpp"
#include "gabpfix/normalize.hpp"
#include "gabpfix/outer_solver.hpp"
#include "gabpfix/sparse_sym_matrix.hpp"
#include "gabpfix/spectral_radius.hpp"
#include "gabpfix/walk_summability.hpp"

#endif  // GABPFIX_GABPFIX_HPP
