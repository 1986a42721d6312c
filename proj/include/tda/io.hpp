#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tda/types.hpp"

namespace tda::io {

// All binary formats in this project are little-endian regardless of host.

class BinaryWriter {
  public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void bytes(const void* p, std::size_t n) {
        os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!os_) throw IoError("write failed");
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) { put_le(v); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void magic(const char (&m)[5]) { bytes(m, 4); }

    void f64_array(std::span<const double> v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (double x : v) f64(x);
    }
    void f64_matrix(const Matrix& m) {
        u32(static_cast<std::uint32_t>(m.rows));
        u32(static_cast<std::uint32_t>(m.cols));
        for (double x : m.data) f64(x);
    }

  private:
    template <typename T>
    void put_le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
        bytes(buf, sizeof(T));
    }

    std::ostream& os_;
};

class BinaryReader {
  public:
    explicit BinaryReader(std::istream& is) : is_(is) {}

    void bytes(void* p, std::size_t n, const char* what) {
        is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n)
            throw IoError(std::string("truncated input while reading ") + what);
    }
    std::uint8_t u8(const char* what = "u8") {
        std::uint8_t v;
        bytes(&v, 1, what);
        return v;
    }
    std::uint16_t u16(const char* what = "u16") { return get_le<std::uint16_t>(what); }
    std::uint32_t u32(const char* what = "u32") { return get_le<std::uint32_t>(what); }
    std::uint64_t u64(const char* what = "u64") { return get_le<std::uint64_t>(what); }
    double f64(const char* what = "f64") {
        return std::bit_cast<double>(get_le<std::uint64_t>(what));
    }
    void expect_magic(const char (&m)[5], const char* format_name) {
        char buf[4];
        bytes(buf, 4, "magic");
        if (std::memcmp(buf, m, 4) != 0)
            throw IoError(std::string("bad magic, not a ") + format_name + " file");
    }

    std::vector<double> f64_array(const char* what = "array") {
        std::uint32_t n = u32(what);
        std::vector<double> v(n);
        for (auto& x : v) x = f64(what);
        return v;
    }
    Matrix f64_matrix(const char* what = "matrix") {
        std::uint32_t r = u32(what);
        std::uint32_t c = u32(what);
        Matrix m(r, c);
        for (auto& x : m.data) x = f64(what);
        return m;
    }

    bool at_eof() {
        is_.peek();
        return is_.eof();
    }

  private:
    template <typename T>
    T get_le(const char* what) {
        unsigned char buf[sizeof(T)];
        bytes(buf, sizeof(T), what);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }

    std::istream& is_;
};

}  // namespace tda::io
