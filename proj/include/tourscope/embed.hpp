#pragma once

#include "tourscope/types.hpp"

namespace tourscope {

/// First d principal component scores of X.
Matrix pca_embed(const DataMatrix& x, Index d);

}  // namespace tourscope
