#include "tourscope/embed.hpp"

#include "tourscope/linalg.hpp"

namespace tourscope {

Matrix pca_embed(const DataMatrix& x, Index d) { return pca(x, d).scores; }

}  // namespace tourscope
