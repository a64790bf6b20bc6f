#include "nlfront/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nlfront/errors.hpp"

namespace nlfront {

namespace {

constexpr char kMagic[8] = {'N', 'L', 'F', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <class T>
void put(unsigned char* p, T v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) p[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <class T>
T get(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    T v;
    std::memcpy(&v, &bits, sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    unsigned char head[64] = {};
    std::memcpy(head, kMagic, 8);
    put<std::uint32_t>(head + 8, kSnapshotVersion);
    put<std::uint32_t>(head + 12, static_cast<std::uint32_t>(f.frame));
    put<std::uint64_t>(head + 16, f.size());
    put<double>(head + 24, f.x_min);
    put<double>(head + 32, f.dx);
    put<double>(head + 40, f.time);
    put<double>(head + 48, f.r);
    put<double>(head + 56, f.tilt);
    out.write(reinterpret_cast<const char*>(head), 64);
    std::vector<unsigned char> body(8 * f.size());
    for (std::size_t i = 0; i < f.size(); ++i) put<double>(body.data() + 8 * i, f.values[i]);
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!out) throw ConfigError("write failed: " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    unsigned char head[64];
    if (!in.read(reinterpret_cast<char*>(head), 64) || std::memcmp(head, kMagic, 8) != 0)
        throw ConfigError("not an nlfront snapshot: " + path);
    if (get<std::uint32_t>(head + 8) != kSnapshotVersion) throw ConfigError("unsupported snapshot version: " + path);
    const auto frame = get<std::uint32_t>(head + 12);
    if (frame > 2) throw ConfigError("bad frame in snapshot: " + path);
    Field f;
    f.frame = static_cast<Frame>(frame);
    const auto count = get<std::uint64_t>(head + 16);
    f.x_min = get<double>(head + 24);
    f.dx = get<double>(head + 32);
    f.time = get<double>(head + 40);
    f.r = get<double>(head + 48);
    f.tilt = get<double>(head + 56);
    std::vector<unsigned char> body(8 * count);
    if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
        throw ConfigError("truncated snapshot: " + path);
    f.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) f.values[i] = get<double>(body.data() + 8 * i);
    return f;
}

}  // namespace nlfront
