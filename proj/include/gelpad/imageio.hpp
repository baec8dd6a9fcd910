#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gelpad/image.hpp"

namespace gelpad {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PgmError : public std::runtime_error {
public:
    enum class Kind { BadMagic, MalformedHeader, UnsupportedMaxval, Truncated };

    PgmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

namespace detail {

inline bool is_pgm_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Reads one unsigned decimal header token, skipping whitespace and '#' comments.
inline long read_pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos,
                           const char* field) {
    for (;;) {
        while (pos < bytes.size() && is_pgm_space(bytes[pos])) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n' && bytes[pos] != '\r') ++pos;
            continue;
        }
        break;
    }
    if (pos >= bytes.size()) {
        throw PgmError(PgmError::Kind::MalformedHeader,
                       std::string("malformed PGM header: missing ") + field);
    }
    long value = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000'000L) {
            throw PgmError(PgmError::Kind::MalformedHeader,
                           std::string("malformed PGM header: ") + field + " out of range");
        }
        ++pos;
    }
    if (pos == start) {
        throw PgmError(PgmError::Kind::MalformedHeader,
                       std::string("malformed PGM header: ") + field + " is not a number");
    }
    return value;
}

}  // namespace detail

// Binary PGM (P5), maxval 255 only.
inline GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw PgmError(PgmError::Kind::BadMagic, "not a binary PGM: missing P5 magic");
    }
    std::size_t pos = 2;
    if (pos < bytes.size() && !detail::is_pgm_space(bytes[pos]) && bytes[pos] != '#') {
        throw PgmError(PgmError::Kind::MalformedHeader, "malformed PGM header after magic");
    }
    long width = detail::read_pgm_token(bytes, pos, "width");
    long height = detail::read_pgm_token(bytes, pos, "height");
    long maxval = detail::read_pgm_token(bytes, pos, "maxval");
    if (width < 1 || height < 1) {
        throw PgmError(PgmError::Kind::MalformedHeader, "malformed PGM header: zero dimension");
    }
    if (maxval != 255) {
        throw PgmError(PgmError::Kind::UnsupportedMaxval,
                       "unsupported maxval " + std::to_string(maxval) + " (only 255)");
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size() || !detail::is_pgm_space(bytes[pos])) {
        throw PgmError(PgmError::Kind::MalformedHeader,
                       "malformed PGM header: no whitespace after maxval");
    }
    ++pos;
    const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < need) {
        throw PgmError(PgmError::Kind::Truncated,
                       "truncated PGM pixel data: expected " + std::to_string(need) +
                           " bytes, found " + std::to_string(bytes.size() - pos));
    }
    std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(px));
}

inline std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                               std::to_string(image.height()) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + image.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), image.buffer().begin(), image.buffer().end());
    return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
    return decode_pgm(read_file_bytes(path));
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
    write_file_bytes(path, encode_pgm(image));
}

struct SequenceManifest {
    double fps = 10.0;
    double umPerPixel = 1.0;
    std::string framePattern = "frame_%06d.pgm";
    int frameCount = 1;

    void validate() const {
        if (!(fps > 0.0)) throw std::invalid_argument("manifest: fps must be > 0");
        if (!(umPerPixel > 0.0)) throw std::invalid_argument("manifest: umPerPixel must be > 0");
        if (frameCount < 1) throw std::invalid_argument("manifest: frameCount must be >= 1");
        if (framePattern.find('%') == std::string::npos) {
            throw std::invalid_argument("manifest: framePattern needs an integer placeholder");
        }
    }

    std::string frame_name(int index) const {
        char buf[512];
        int n = std::snprintf(buf, sizeof buf, framePattern.c_str(), index);
        if (n < 0 || static_cast<std::size_t>(n) >= sizeof buf) {
            throw std::invalid_argument("manifest: bad framePattern '" + framePattern + "'");
        }
        return std::string(buf, static_cast<std::size_t>(n));
    }

    double timestamp(int index) const { return static_cast<double>(index) / fps; }
};

inline nlohmann::json to_json(const SequenceManifest& m) {
    return nlohmann::json{{"fps", m.fps},
                          {"umPerPixel", m.umPerPixel},
                          {"framePattern", m.framePattern},
                          {"frameCount", m.frameCount}};
}

inline SequenceManifest manifest_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("manifest: expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "fps" && key != "umPerPixel" && key != "framePattern" && key != "frameCount") {
            throw std::invalid_argument("manifest: unknown key '" + key + "'");
        }
    }
    SequenceManifest m;
    try {
        m.fps = j.at("fps").get<double>();
        m.umPerPixel = j.at("umPerPixel").get<double>();
        m.framePattern = j.at("framePattern").get<std::string>();
        m.frameCount = j.at("frameCount").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("manifest: ") + e.what());
    }
    m.validate();
    return m;
}

inline SequenceManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("manifest " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

inline void write_manifest(const std::filesystem::path& path, const SequenceManifest& m) {
    write_text_file(path, to_json(m).dump(2) + "\n");
}

class MissingFrameError : public IoError {
public:
    MissingFrameError(int index, const std::string& path)
        : IoError("missing frame " + std::to_string(index) + ": " + path), index_(index) {}
    int index() const noexcept { return index_; }

private:
    int index_;
};

// Single-consumer stream over a PGM sequence. Holds at most one decoded frame.
class FrameSequence {
public:
    FrameSequence(SequenceManifest manifest, std::filesystem::path directory)
        : manifest_(std::move(manifest)), dir_(std::move(directory)) {
        manifest_.validate();
        for (int i = 0; i < manifest_.frameCount; ++i) {
            auto p = path_of(i);
            if (!std::filesystem::is_regular_file(p)) throw MissingFrameError(i, p.string());
        }
    }

    const SequenceManifest& manifest() const noexcept { return manifest_; }
    int size() const noexcept { return manifest_.frameCount; }
    int position() const noexcept { return next_; }

    std::filesystem::path path_of(int index) const { return dir_ / manifest_.frame_name(index); }

    // Returns the next frame in index order, or nullopt after the last one.
    std::optional<Frame> next() {
        if (next_ >= manifest_.frameCount) return std::nullopt;
        const int i = next_++;
        auto p = path_of(i);
        if (!std::filesystem::is_regular_file(p)) throw MissingFrameError(i, p.string());
        Frame f{read_pgm(p), i, manifest_.timestamp(i)};
        if (i == 0) {
            width_ = f.width();
            height_ = f.height();
        } else if (f.width() != width_ || f.height() != height_) {
            throw IoError("frame " + std::to_string(i) + " is " + std::to_string(f.width()) +
                          "x" + std::to_string(f.height()) + ", expected " +
                          std::to_string(width_) + "x" + std::to_string(height_));
        }
        return f;
    }

    // Decodes one frame by index without advancing the stream.
    Frame frame_at(int index) const {
        if (index < 0 || index >= manifest_.frameCount) {
            throw std::out_of_range("frame index " + std::to_string(index) + " out of range");
        }
        auto p = path_of(index);
        if (!std::filesystem::is_regular_file(p)) throw MissingFrameError(index, p.string());
        return Frame{read_pgm(p), index, manifest_.timestamp(index)};
    }

private:
    SequenceManifest manifest_;
    std::filesystem::path dir_;
    int next_ = 0;
    int width_ = 0;
    int height_ = 0;
};

inline FrameSequence open_sequence(const SequenceManifest& manifest,
                                   const std::filesystem::path& directory) {
    return FrameSequence(manifest, directory);
}

inline FrameSequence open_sequence(const std::filesystem::path& directory) {
    return FrameSequence(read_manifest(directory / "manifest.json"), directory);
}

}  // namespace gelpad
