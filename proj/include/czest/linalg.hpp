#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace czest
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Block-diagonal stacking; zero-row or zero-column blocks are allowed.
inline Matrix block_diag(std::span<const Matrix> blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto& m : blocks)
    {
        rows += m.rows();
        cols += m.cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& m : blocks)
    {
        out.block(r, c, m.rows(), m.cols()) = m;
        r += m.rows();
        c += m.cols();
    }
    return out;
}

inline Matrix block_diag(std::initializer_list<Matrix> blocks)
{
    std::vector<Matrix> v(blocks);
    return block_diag(std::span<const Matrix>(v));
}

inline Vector vstack(std::span<const Vector> parts)
{
    Eigen::Index n = 0;
    for (const auto& p : parts) n += p.size();
    Vector out(n);
    Eigen::Index o = 0;
    for (const auto& p : parts)
    {
        out.segment(o, p.size()) = p;
        o += p.size();
    }
    return out;
}

inline Vector vstack(std::initializer_list<Vector> parts)
{
    std::vector<Vector> v(parts);
    return vstack(std::span<const Vector>(v));
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// E_{alpha,u} = e_alpha^T (x) I_n : selects block alpha (0-based) of a u-block vector.
class ProjectionMatrix
{
    public:
        ProjectionMatrix(int alpha, int blocks, int block_dim)
            : alpha_(alpha), blocks_(blocks), block_dim_(block_dim)
        {
            if (blocks < 1 || block_dim < 0 || alpha < 0 || alpha >= blocks)
                throw std::invalid_argument("ProjectionMatrix: alpha must lie in [0, blocks).");
        }

        int alpha() const { return alpha_; }
        int blocks() const { return blocks_; }
        int block_dim() const { return block_dim_; }

        Matrix dense() const
        {
            Matrix e = Matrix::Zero(1, blocks_);
            e(0, alpha_) = 1.0;
            return kron(e, Matrix::Identity(block_dim_, block_dim_));
        }

    private:
        int alpha_;
        int blocks_;
        int block_dim_;
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace czest
