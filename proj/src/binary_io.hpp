#pragma once

// Little-endian stream helpers shared by the graph and model file readers.
// The reader tracks its byte offset so format errors can name the position.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gnnmerge/errors.hpp"

namespace gnnmerge::io {

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw FormatError("cannot open " + path + " for writing");
    }

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v)); }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_le(bits);
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_le(bits);
    }

    void finish(const std::string& what) {
        out_.flush();
        if (!out_) throw FormatError("write failure while saving " + what + " to " + path_);
    }

private:
    template <typename T>
    void put_le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
        bytes(buf, sizeof(T));
    }

    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw FormatError("cannot open " + path + " for reading");
    }

    std::uint64_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

    void bytes(void* data, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            fail(std::string("truncated while reading ") + what);
        }
        offset_ += n;
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        bytes(&v, 1, what);
        return v;
    }
    std::uint32_t u32(const char* what) { return get_le<std::uint32_t>(what); }
    std::uint64_t u64(const char* what) { return get_le<std::uint64_t>(what); }
    std::int32_t i32(const char* what) { return static_cast<std::int32_t>(get_le<std::uint32_t>(what)); }
    float f32(const char* what) {
        const std::uint32_t bits = get_le<std::uint32_t>(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64(const char* what) {
        const std::uint64_t bits = get_le<std::uint64_t>(what);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    bool at_eof() {
        return in_.peek() == std::char_traits<char>::eof();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw FormatError(path_ + ": " + message + " (byte offset " +
                          std::to_string(offset_) + ")");
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

    std::string path_;
    std::ifstream in_;
    std::uint64_t offset_ = 0;
};

} // namespace gnnmerge::io
