#include "locbasis/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace locbasis {

namespace {

constexpr char kMagic[4] = {'L', 'B', 'M', 'X'};

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size()) {
            throw std::runtime_error("matrix file truncated");
        }
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

std::string read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_binary(const std::filesystem::path& path, const std::string& data) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open file for writing: " + tmp.string());
        }
        out.write(data.data(), std::streamsize(data.size()));
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void save_complex_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                         const MatrixFileInfo& info) {
    std::string buf;
    buf.reserve(64 + std::size_t(m.size()) * 16);
    buf.append(kMagic, 4);
    put_u32(buf, info.version);
    put_u32(buf, static_cast<std::uint32_t>(info.kind));
    put_u64(buf, std::uint64_t(m.rows()));
    put_u64(buf, std::uint64_t(m.cols()));
    put_u64(buf, info.seed);
    put_f64(buf, info.final_s);
    put_u64(buf, info.config.max_proposals);
    put_u64(buf, info.config.saturation_window);
    put_u64(buf, info.config.renorm_interval);
    put_f64(buf, info.config.min_delta);
    put_f64(buf, info.config.theta_max);
    put_f64(buf, info.config.window_rel_tol);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f64(buf, m(r, c).real());
            put_f64(buf, m(r, c).imag());
        }
    }
    write_binary(path, buf);
}

Eigen::MatrixXcd load_complex_matrix(const std::filesystem::path& path, MatrixFileInfo* info) {
    const std::string data = read_binary(path);
    Reader rd{data};
    rd.need(4);
    if (std::memcmp(data.data(), kMagic, 4) != 0) {
        throw std::runtime_error("bad magic in " + path.string());
    }
    rd.pos = 4;
    MatrixFileInfo hdr;
    hdr.version = rd.u32();
    if (hdr.version != 1) {
        throw std::runtime_error("unsupported matrix file version");
    }
    hdr.kind = static_cast<MatrixKind>(rd.u32());
    const std::uint64_t rows = rd.u64();
    const std::uint64_t cols = rd.u64();
    hdr.seed = rd.u64();
    hdr.final_s = rd.f64();
    hdr.config.max_proposals = rd.u64();
    hdr.config.saturation_window = rd.u64();
    hdr.config.renorm_interval = rd.u64();
    hdr.config.min_delta = rd.f64();
    hdr.config.theta_max = rd.f64();
    hdr.config.window_rel_tol = rd.f64();
    hdr.config.seed = hdr.seed;

    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
        throw std::runtime_error("implausible matrix dimensions in " + path.string());
    }
    rd.need(rows * cols * 16);
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double re = rd.f64();
            const double im = rd.f64();
            m(r, c) = std::complex<double>(re, im);
        }
    }
    if (info) *info = hdr;
    return m;
}

void save_basis(const std::filesystem::path& path, const LocalizedBasis& basis,
                const OptimizerConfig& cfg, double final_s) {
    MatrixFileInfo info;
    info.kind = MatrixKind::Basis;
    info.seed = cfg.seed;
    info.final_s = final_s;
    info.config = cfg;
    save_complex_matrix(path, basis.coeffs, info);
}

LocalizedBasis load_basis(const std::filesystem::path& path, MatrixFileInfo* info) {
    MatrixFileInfo hdr;
    Eigen::MatrixXcd m = load_complex_matrix(path, &hdr);
    if (hdr.kind != MatrixKind::Basis) {
        throw std::runtime_error("not a basis file: " + path.string());
    }
    if (m.rows() != m.cols()) {
        throw std::runtime_error("basis matrix is not square: " + path.string());
    }
    if (info) *info = hdr;
    LocalizedBasis basis;
    basis.space = build_space(static_cast<int>(m.rows()));
    basis.coeffs = std::move(m);
    return basis;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    write_binary(path, content);
}

std::string read_text_file(const std::filesystem::path& path) {
    return read_binary(path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace locbasis
