#include "riskflow/snapshots/store.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "riskflow/core/errors.hpp"

namespace fs = std::filesystem;

namespace riskflow {
namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw StorageError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

// Exclusive advisory lock on <root>/.lock for the lifetime of the object.
class StoreLock {
 public:
  explicit StoreLock(const fs::path& root) {
    const auto path = root / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StorageError("cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw StorageError("cannot lock " + path.string());
    }
  }
  ~StoreLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + temp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw StorageError("cannot write " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) throw StorageError("cannot rename " + temp.string() + ": " + ec.message());
}

}  // namespace

std::string snapshot_id(const RiskGraph& model, const PropagationResult& result) {
  const std::string content = model_to_json(model).dump() + "\n" + result_to_json(result).dump() +
                              "\n" + provenance_to_json(result).dump();
  return sha256_hex(content);
}

SnapshotStore::SnapshotStore(fs::path root, Clock clock)
    : root_(std::move(root)), clock_(std::move(clock)) {
  if (!clock_) clock_ = [] { return std::chrono::system_clock::now(); };
  std::error_code ec;
  fs::create_directories(root_ / "snapshots", ec);
  if (ec) throw StorageError("cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path SnapshotStore::snapshot_path(std::string_view id) const {
  return root_ / "snapshots" / (std::string(id) + ".json");
}

std::string SnapshotStore::save(const RiskGraph& model, const PropagationResult& result,
                                std::string label) {
  const auto id = snapshot_id(model, result);
  StoreLock lock(root_);
  if (fs::exists(snapshot_path(id))) return id;

  Snapshot snapshot{id, clock_(), std::move(label), model, result};
  write_file_atomic(snapshot_path(id), snapshot_to_json(snapshot).dump(2) + "\n");

  const Json record{{"id", id},
                    {"created_at", format_timestamp(snapshot.created_at)},
                    {"label", snapshot.label}};
  std::ofstream index(root_ / "index.ndjson", std::ios::app | std::ios::binary);
  if (!index) throw StorageError("cannot append to " + (root_ / "index.ndjson").string());
  index << record.dump() << '\n';
  if (!index.flush()) throw StorageError("cannot append to " + (root_ / "index.ndjson").string());
  return id;
}

std::vector<SnapshotSummary> SnapshotStore::read_index() const {
  std::vector<SnapshotSummary> out;
  std::ifstream in(root_ / "index.ndjson", std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto record = Json::parse(line);
      out.push_back({record.at("id").get<std::string>(),
                     parse_timestamp(record.at("created_at").get<std::string>()),
                     record.at("label").get<std::string>()});
    } catch (const std::exception& e) {
      throw StorageError("corrupt index record on line " + std::to_string(number) + ": " +
                         e.what());
    }
  }
  return out;
}

std::string SnapshotStore::resolve(std::string_view id_or_prefix) const {
  if (id_or_prefix.size() < 4) {
    throw NotFound("snapshot id '" + std::string(id_or_prefix) + "' is too short");
  }
  std::vector<std::string> matches;
  for (const auto& entry : read_index()) {
    if (entry.id.starts_with(id_or_prefix)) matches.push_back(entry.id);
  }
  if (matches.empty()) throw NotFound("no snapshot '" + std::string(id_or_prefix) + "'");
  if (matches.size() > 1) {
    throw NotFound("snapshot prefix '" + std::string(id_or_prefix) + "' is ambiguous");
  }
  return matches.front();
}

Snapshot SnapshotStore::load(std::string_view id) const {
  const auto full = resolve(id);
  const auto path = snapshot_path(full);
  if (!fs::exists(path)) throw NotFound("snapshot file missing for '" + full + "'");
  try {
    return snapshot_from_json(parse_json_text(read_file(path)));
  } catch (const StorageError&) {
    throw;
  } catch (const Error& e) {
    throw StorageError("corrupt snapshot " + full + ": " + e.what());
  }
}

std::vector<SnapshotSummary> SnapshotStore::list(std::optional<TimePoint> from,
                                                 std::optional<TimePoint> to) const {
  auto entries = read_index();
  std::erase_if(entries, [&](const SnapshotSummary& s) {
    return (from && s.created_at < *from) || (to && s.created_at > *to);
  });
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.created_at < b.created_at;
  });
  return entries;
}

RiskDelta SnapshotStore::diff(std::string_view id_a, std::string_view id_b) const {
  const auto a = load(id_a);
  const auto b = load(id_b);
  return diff_results(a.result, b.result);
}

}  // namespace riskflow
