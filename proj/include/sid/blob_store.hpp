#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sid/matrix.hpp"

namespace sid {

/// Identifies a blob inside the store: a run namespace plus a name such as
/// "O_i.slice.3". Keys are write-once.
struct BlobKey {
    std::string ns;
    std::string name;

    std::string full() const { return ns + "/" + name; }
};

/// Binary matrix framing: magic "SIDM", rows and cols as little-endian
/// unsigned 64-bit, then rows*cols doubles row-major. Round-trips bit-exactly.
std::vector<std::uint8_t> serialize_matrix(const Matrix& m);
Matrix deserialize_matrix(std::span<const std::uint8_t> blob);

void write_matrix_file(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_file(const std::filesystem::path& path);

/// In-process key/value store for matrices. Stands in for the external data
/// layer a distributed deployment would use: values are immutable once
/// published, a key can be written exactly once, and readers either see the
/// whole value or MissingKey, never a partial write.
class BlobStore {
public:
    /// Publishes a matrix under the key. Throws DuplicateKey on rewrites.
    void put(const BlobKey& key, Matrix m);

    /// Returns the published value. Throws MissingKey when unwritten.
    std::shared_ptr<const Matrix> get(const BlobKey& key) const;

    bool contains(const BlobKey& key) const;

    /// Names written under a namespace, unordered.
    std::vector<std::string> names(const std::string& ns) const;

    /// Writes every blob of a namespace into dir as "<name>.sidm" files.
    void dump_namespace(const std::string& ns, const std::filesystem::path& dir) const;

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<const Matrix>> blobs_;
};

}  // namespace sid
