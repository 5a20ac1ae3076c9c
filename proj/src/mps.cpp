#include "qenc/mps.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "qenc/version.hpp"

namespace qenc {

long MpsState::max_bond_dim() const {
    long m = 1;
    for (const auto& site : sites) m = std::max(m, site[0].cols());
    return m;
}

double MpsState::center_norm() const {
    double s = 0.0;
    for (const auto& blk : sites[ortho_center]) s += blk.squaredNorm();
    return std::sqrt(s);
}

double MpsState::norm_full() const {
    // transfer contraction from the right edge
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (int n = n_sites() - 1; n >= 0; --n) {
        const long dl = sites[n][0].rows();
        MatrixXcd next = MatrixXcd::Zero(dl, dl);
        for (const auto& blk : sites[n]) next += blk * env * blk.adjoint();
        env = next;
    }
    return std::sqrt(std::abs(env(0, 0)));
}

MpsState init_product_state(const TwoQubitState& state0, const ModelParams& p) {
    if (std::abs(state0.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("init_product_state: state not normalized");
    p.validate();

    const Vector4cd qc = bell_to_computational() * state0.amps;
    Matrix2cd m;
    m << qc[0], qc[1], qc[2], qc[3];  // (s0, s1)
    Eigen::JacobiSVD<Matrix2cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const long rank = svd.singularValues()[1] > 1e-15 ? 2 : 1;

    MpsState mps;
    mps.sites.resize(2 + p.n_modes);
    mps.sites[0].assign(2, MatrixXcd::Zero(1, rank));
    mps.sites[1].assign(2, MatrixXcd::Zero(rank, 1));
    for (int s = 0; s < 2; ++s)
        for (long k = 0; k < rank; ++k) {
            mps.sites[0][s](0, k) = svd.matrixU()(s, k) * svd.singularValues()[k];
            mps.sites[1][s](k, 0) = std::conj(svd.matrixV()(s, k));
        }
    for (int b = 0; b < p.n_modes; ++b) {
        mps.sites[2 + b].assign(p.n_bos, MatrixXcd::Zero(1, 1));
        mps.sites[2 + b][0](0, 0) = 1.0;
    }
    mps.ortho_center = 0;
    return mps;
}

MpsState mps_from_dense(const VectorXcd& psi, const std::vector<int>& dims) {
    long total = 1;
    for (int d : dims) total *= d;
    if (total != psi.size()) throw std::invalid_argument("mps_from_dense: dimension mismatch");

    MpsState mps;
    mps.sites.resize(dims.size());
    MatrixXcd rest = psi.transpose();  // (1 x total), row-major order over sites
    long dl = 1;
    for (std::size_t n = 0; n + 1 < dims.size(); ++n) {
        const int d = dims[n];
        const long right = rest.cols() / d;
        // rows (dl*d), columns the remaining sites
        MatrixXcd m(dl * d, right);
        for (long r = 0; r < dl; ++r)
            for (int s = 0; s < d; ++s)
                m.row(s * dl + r) = rest.block(r, s * right, 1, right);
        Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        long rank = 0;
        const double cut = svd.singularValues()[0] * 1e-14;
        for (long k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()[k] > cut) ++rank;
        rank = std::max<long>(rank, 1);

        mps.sites[n].assign(d, MatrixXcd::Zero(dl, rank));
        for (int s = 0; s < d; ++s)
            for (long r = 0; r < dl; ++r)
                mps.sites[n][s].row(r) = svd.matrixU().row(s * dl + r).head(rank);
        rest = svd.singularValues().head(rank).asDiagonal() *
               svd.matrixV().leftCols(rank).adjoint();
        dl = rank;
    }
    const int d = dims.back();
    mps.sites.back().assign(d, MatrixXcd::Zero(dl, 1));
    for (int s = 0; s < d; ++s) mps.sites.back()[s] = rest.col(s);
    mps.ortho_center = static_cast<int>(dims.size()) - 1;
    return mps;
}

void move_center_right(MpsState& mps) {
    const int n = mps.ortho_center;
    if (n + 1 >= mps.n_sites()) throw std::logic_error("move_center_right at the edge");
    const int d = mps.phys_dim(n);
    const long dl = mps.sites[n][0].rows(), dr = mps.sites[n][0].cols();
    MatrixXcd m(dl * d, dr);
    for (int s = 0; s < d; ++s) m.middleRows(s * dl, dl) = mps.sites[n][s];
    Eigen::HouseholderQR<MatrixXcd> qr(m);
    const long rank = std::min(dl * d, dr);
    const MatrixXcd q = MatrixXcd(qr.householderQ()).leftCols(rank);
    const MatrixXcd r =
        qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>().toDenseMatrix();
    for (int s = 0; s < d; ++s) mps.sites[n][s] = q.middleRows(s * dl, dl);
    for (auto& blk : mps.sites[n + 1]) blk = (r * blk).eval();
    mps.ortho_center = n + 1;
}

void move_center_left(MpsState& mps) {
    const int n = mps.ortho_center;
    if (n == 0) throw std::logic_error("move_center_left at the edge");
    const int d = mps.phys_dim(n);
    const long dl = mps.sites[n][0].rows(), dr = mps.sites[n][0].cols();
    MatrixXcd m(dl, d * dr);
    for (int s = 0; s < d; ++s) m.middleCols(s * dr, dr) = mps.sites[n][s];
    // LQ through QR of the adjoint
    Eigen::HouseholderQR<MatrixXcd> qr(m.adjoint());
    const long rank = std::min(dl, d * dr);
    const MatrixXcd q = MatrixXcd(qr.householderQ()).leftCols(rank);
    const MatrixXcd r =
        qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>().toDenseMatrix();
    for (int s = 0; s < d; ++s) mps.sites[n][s] = q.middleRows(s * dr, dr).adjoint();
    for (auto& blk : mps.sites[n - 1]) blk = (blk * r.adjoint()).eval();
    mps.ortho_center = n - 1;
}

void move_center_to(MpsState& mps, int site) {
    while (mps.ortho_center < site) move_center_right(mps);
    while (mps.ortho_center > site) move_center_left(mps);
}

DensityMatrix4 reduced_two_qubit_dm(const MpsState& mps) {
    if (mps.n_sites() < 2 || mps.phys_dim(0) != 2 || mps.phys_dim(1) != 2)
        throw std::invalid_argument("reduced_two_qubit_dm: not a qubits+bath chain");

    // environment of the bath sites (gauge-independent)
    const long d2 = mps.sites[1][0].cols();
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (int n = mps.n_sites() - 1; n >= 2; --n) {
        const long dl = mps.sites[n][0].rows();
        MatrixXcd next = MatrixXcd::Zero(dl, dl);
        for (const auto& blk : mps.sites[n]) next += blk * env * blk.adjoint();
        env = next;
    }
    if (env.rows() != d2) throw std::logic_error("reduced_two_qubit_dm: bond mismatch");

    Matrix4cd rho_comp = Matrix4cd::Zero();
    std::vector<MatrixXcd> theta(4);  // (1 x d2) rows, computational index 2*s0+s1
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
            theta[2 * s0 + s1] = mps.sites[0][s0] * mps.sites[1][s1];
    for (int q = 0; q < 4; ++q)
        for (int qp = 0; qp < 4; ++qp)
            rho_comp(q, qp) = (theta[q] * env * theta[qp].adjoint())(0, 0);

    const Matrix4cd u = bell_to_computational();
    return {u.adjoint() * rho_comp * u, DmBasis::bell};
}

namespace {
void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
}  // namespace

void save_checkpoint(const MpsState& mps, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint format assumes a little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os.write("QENCMPS\0", 8);
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(mps.n_sites()));
    write_u32(os, static_cast<std::uint32_t>(mps.ortho_center));
    os.write(reinterpret_cast<const char*>(&mps.trunc_log), sizeof(double));
    os.write(reinterpret_cast<const char*>(&mps.norm_drift), sizeof(double));
    write_u32(os, mps.saturated ? 1 : 0);
    for (const auto& site : mps.sites) {
        write_u32(os, static_cast<std::uint32_t>(site.size()));
        write_u32(os, static_cast<std::uint32_t>(site[0].rows()));
        write_u32(os, static_cast<std::uint32_t>(site[0].cols()));
        for (const auto& blk : site)
            os.write(reinterpret_cast<const char*>(blk.data()),
                     sizeof(cplx) * blk.size());
    }
    if (!os) throw std::runtime_error("save_checkpoint: write failed");
}

MpsState load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "QENCMPS\0", 8) != 0)
        throw std::runtime_error("load_checkpoint: bad magic");
    if (read_u32(is) != static_cast<std::uint32_t>(kCheckpointVersion))
        throw std::runtime_error("load_checkpoint: unsupported version");
    MpsState mps;
    const std::uint32_t n_sites = read_u32(is);
    mps.ortho_center = static_cast<int>(read_u32(is));
    is.read(reinterpret_cast<char*>(&mps.trunc_log), sizeof(double));
    is.read(reinterpret_cast<char*>(&mps.norm_drift), sizeof(double));
    mps.saturated = read_u32(is) != 0;
    mps.sites.resize(n_sites);
    for (auto& site : mps.sites) {
        const std::uint32_t d = read_u32(is);
        const std::uint32_t rows = read_u32(is);
        const std::uint32_t cols = read_u32(is);
        site.assign(d, MatrixXcd::Zero(rows, cols));
        for (auto& blk : site)
            is.read(reinterpret_cast<char*>(blk.data()), sizeof(cplx) * blk.size());
    }
    if (!is) throw std::runtime_error("load_checkpoint: truncated file");
    return mps;
}

}  // namespace qenc
