#include "sid/blob_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

namespace sid {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'S', 'I', 'D', 'M'};
constexpr std::size_t kHeaderBytes = 4 + 8 + 8;
}  // namespace

std::vector<std::uint8_t> serialize_matrix(const Matrix& m) {
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    std::vector<std::uint8_t> out(kHeaderBytes + sizeof(double) * rows * cols);
    std::memcpy(out.data(), kMagic, 4);
    std::memcpy(out.data() + 4, &rows, 8);
    std::memcpy(out.data() + 12, &cols, 8);
    if (rows * cols > 0) {
        std::memcpy(out.data() + kHeaderBytes, m.data(), sizeof(double) * rows * cols);
    }
    return out;
}

Matrix deserialize_matrix(std::span<const std::uint8_t> blob) {
    if (blob.size() < kHeaderBytes) {
        throw SerializationError("blob shorter than header");
    }
    if (std::memcmp(blob.data(), kMagic, 4) != 0) {
        throw SerializationError("bad magic tag, not a matrix blob");
    }
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::memcpy(&rows, blob.data() + 4, 8);
    std::memcpy(&cols, blob.data() + 12, 8);
    const std::uint64_t count = rows * cols;
    if (blob.size() != kHeaderBytes + sizeof(double) * count) {
        throw SerializationError("blob length does not match header dimensions");
    }
    std::vector<double> data(count);
    if (count > 0) {
        std::memcpy(data.data(), blob.data() + kHeaderBytes, sizeof(double) * count);
    }
    return Matrix(static_cast<Index>(rows), static_cast<Index>(cols), std::move(data));
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& m) {
    const auto blob = serialize_matrix(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SerializationError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
    if (!out) throw SerializationError("short write to " + path.string());
}

Matrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SerializationError("cannot open " + path.string());
    std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return deserialize_matrix(blob);
}

void BlobStore::put(const BlobKey& key, Matrix m) {
    if (key.ns.empty() || key.name.empty()) {
        throw InvalidShape("blob key namespace and name must be non-empty");
    }
    auto value = std::make_shared<const Matrix>(std::move(m));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = blobs_.emplace(key.full(), std::move(value));
    if (!inserted) {
        throw DuplicateKey("key already written: " + key.full());
    }
}

std::shared_ptr<const Matrix> BlobStore::get(const BlobKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = blobs_.find(key.full());
    if (it == blobs_.end()) {
        throw MissingKey("key not written: " + key.full());
    }
    return it->second;
}

bool BlobStore::contains(const BlobKey& key) const {
    std::shared_lock lock(mutex_);
    return blobs_.contains(key.full());
}

std::vector<std::string> BlobStore::names(const std::string& ns) const {
    const std::string prefix = ns + "/";
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [key, _] : blobs_) {
        if (key.starts_with(prefix)) out.push_back(key.substr(prefix.size()));
    }
    return out;
}

void BlobStore::dump_namespace(const std::string& ns,
                               const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& name : names(ns)) {
        write_matrix_file(dir / (name + ".sidm"), *get({ns, name}));
    }
}

}  // namespace sid
