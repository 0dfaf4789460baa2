#include <cstring>
#include <fstream>
#include <iterator>

#include "polywave/mesh.hpp"

namespace polywave {

namespace {

constexpr char kMagic[8] = {'E', 'S', 'C', 'S', 'M', 'E', 'S', 'H'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
void put_array(std::ofstream& out, const T* data, std::uint64_t count) {
    put(out, count);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw InputError("truncated mesh cache " + path);
    return value;
}

template <class T>
std::vector<T> get_array(std::ifstream& in, const std::string& path, std::uint64_t limit) {
    const auto count = get<std::uint64_t>(in, path);
    if (count > limit) throw InputError("corrupt mesh cache " + path);
    std::vector<T> data(count);
    if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(T))))
        throw InputError("truncated mesh cache " + path);
    return data;
}

} // namespace

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write mesh cache " + path);
    out.write(kMagic, sizeof kMagic);
    put(out, kVersion);
    std::vector<double> coords;
    coords.reserve(2 * mesh.vertices.size());
    for (Point2 p : mesh.vertices) {
        coords.push_back(p.x);
        coords.push_back(p.y);
    }
    std::vector<std::uint32_t> tris;
    tris.reserve(3 * mesh.triangles.size());
    for (const auto& t : mesh.triangles) tris.insert(tris.end(), t.begin(), t.end());
    put_array(out, coords.data(), coords.size());
    put_array(out, tris.data(), tris.size());
    put_array(out, mesh.involution.data(), mesh.involution.size());
    put_array(out, mesh.cone_vertex_ids.data(), mesh.cone_vertex_ids.size());
    if (!out) throw InputError("failed writing mesh cache " + path);
}

SurfaceMesh load_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open mesh cache " + path);
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InputError("not a mesh cache: " + path);
    if (get<std::uint32_t>(in, path) != kVersion) throw InputError("unsupported mesh cache version in " + path);
    constexpr std::uint64_t limit = 1ull << 32;
    const auto coords = get_array<double>(in, path, limit);
    const auto tris = get_array<std::uint32_t>(in, path, limit);
    SurfaceMesh mesh;
    mesh.involution = get_array<std::uint32_t>(in, path, limit);
    mesh.cone_vertex_ids = get_array<std::uint32_t>(in, path, limit);
    if (coords.size() % 2 != 0 || tris.size() % 3 != 0 || mesh.involution.size() * 2 != coords.size())
        throw InputError("inconsistent mesh cache " + path);
    for (std::size_t i = 0; i < coords.size(); i += 2) mesh.vertices.push_back({coords[i], coords[i + 1]});
    for (std::size_t i = 0; i < tris.size(); i += 3) {
        for (std::size_t k = 0; k < 3; ++k)
            if (tris[i + k] >= mesh.vertices.size()) throw InputError("corrupt triangle in mesh cache " + path);
        mesh.triangles.push_back({tris[i], tris[i + 1], tris[i + 2]});
    }
    for (std::uint32_t s : mesh.involution)
        if (s >= mesh.vertices.size()) throw InputError("corrupt involution in mesh cache " + path);
    mesh.rebuild_derived();
    mesh.check();
    return mesh;
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

} // namespace polywave
