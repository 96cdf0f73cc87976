#pragma once

/// \file fetch.hpp
/// \brief Download-and-cache of SuiteSparse Matrix Market archives.
///
/// `<base-url>/MM/<group>/<name>.tar.gz` is fetched through a pluggable
/// transport, gunzipped, and the `<name>.mtx` member is cached as
/// `<cache>/<group>/<name>.mtx`. A cached file is returned without touching
/// the transport. Concurrent fetches of one file serialize on a lock file.
///
/// Requires zlib.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "adkrylov/hash.hpp"

namespace adkrylov {

inline constexpr std::string_view kDefaultBaseUrl = "https://sparse.tamu.edu";

struct HttpResponse {
  long status = 0;
  std::string body;
  /// Transport-level failure description (DNS, TLS, ...); empty on success.
  std::string error;
};

using Transport = std::function<HttpResponse(const std::string& url)>;

class FetchError : public std::runtime_error {
 public:
  FetchError(const std::string& what, long status = 0)
      : std::runtime_error(what), status_(status) {}
  long status() const { return status_; }

 private:
  long status_;
};

class ArchiveFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decompresses gzip (or zlib) data.
inline std::string gunzip(std::string_view data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw ArchiveFormatError("gunzip: inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ArchiveFormatError("gunzip: corrupt or truncated gzip data");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw ArchiveFormatError("gunzip: truncated gzip data");
    }
  }
  inflateEnd(&zs);
  return out;
}

namespace detail {

inline std::size_t tar_octal(std::string_view field) {
  std::size_t v = 0;
  for (char c : field) {
    if (c == '\0' || c == ' ') {
      if (v != 0) break;
      continue;
    }
    if (c < '0' || c > '7') throw ArchiveFormatError("tar: bad octal size field");
    v = v * 8 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline std::string_view cstr_field(std::string_view block, std::size_t off, std::size_t len) {
  auto f = block.substr(off, len);
  const auto nul = f.find('\0');
  return nul == std::string_view::npos ? f : f.substr(0, nul);
}

}  // namespace detail

/// Returns the contents of the first regular member whose file name (last path
/// component) equals `basename`. Understands ustar prefixes, GNU long names
/// and pax `path` records.
inline std::optional<std::string> extract_tar_member(std::string_view tar, std::string_view basename) {
  std::size_t off = 0;
  std::string long_name;
  while (off + 512 <= tar.size()) {
    const auto block = tar.substr(off, 512);
    if (block.find_first_not_of('\0') == std::string_view::npos) break;
    std::string name(detail::cstr_field(block, 0, 100));
    const std::string_view magic = block.substr(257, 5);
    if (magic == "ustar") {
      const auto prefix = detail::cstr_field(block, 345, 155);
      if (!prefix.empty()) name = std::string(prefix) + "/" + name;
    }
    const std::size_t size = detail::tar_octal(block.substr(124, 12));
    const char type = block[156];
    const std::size_t data_off = off + 512;
    if (data_off + size > tar.size()) throw ArchiveFormatError("tar: truncated member");
    const auto data = tar.substr(data_off, size);
    off = data_off + (size + 511) / 512 * 512;

    if (type == 'L') {
      long_name = std::string(detail::cstr_field(data, 0, data.size()));
      continue;
    }
    if (type == 'x') {
      // pax records: "<len> key=value\n"
      std::size_t p = 0;
      while (p < data.size()) {
        const auto sp = data.find(' ', p);
        if (sp == std::string_view::npos) break;
        const std::size_t len = std::strtoul(std::string(data.substr(p, sp - p)).c_str(), nullptr, 10);
        if (len == 0 || p + len > data.size()) break;
        const auto rec = data.substr(sp + 1, p + len - sp - 2);
        if (rec.starts_with("path=")) long_name = std::string(rec.substr(5));
        p += len;
      }
      continue;
    }
    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    if (type != '0' && type != '\0') continue;
    const auto slash = name.find_last_of('/');
    const std::string_view leaf =
        slash == std::string::npos ? std::string_view(name) : std::string_view(name).substr(slash + 1);
    if (leaf == basename) return std::string(data);
  }
  return std::nullopt;
}

/// Cache directory: explicit value, then $ADKRYLOV_CACHE, then
/// $XDG_CACHE_HOME/adkrylov, then $HOME/.cache/adkrylov.
inline std::filesystem::path resolve_cache_dir(const std::optional<std::string>& flag = std::nullopt) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("ADKRYLOV_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return std::filesystem::path(xdg) / "adkrylov";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "adkrylov";
  return std::filesystem::temp_directory_path() / "adkrylov-cache";
}

/// Base URL: explicit value, then $ADKRYLOV_BASE_URL, then the SuiteSparse host.
inline std::string resolve_base_url(const std::optional<std::string>& flag = std::nullopt) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("ADKRYLOV_BASE_URL"); env && *env) return env;
  return std::string(kDefaultBaseUrl);
}

inline std::filesystem::path cache_path(const std::filesystem::path& cache_dir, std::string_view group,
                                        std::string_view name) {
  return cache_dir / std::string(group) / (std::string(name) + ".mtx");
}

/// Exclusive advisory lock held for the object's lifetime.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw FetchError("cannot open lock file '" + path.string() + "'");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw FetchError("cannot lock '" + path.string() + "'");
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

struct FetchOptions {
  std::string base_url = std::string(kDefaultBaseUrl);
  /// Download even when cached; a differing result is reported on `warn`.
  bool force = false;
  std::ostream* warn = nullptr;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_atomic(const std::filesystem::path& p, std::string_view data) {
  auto tmp = p;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, p);
}

inline std::filesystem::path fetch_matrix(std::string_view group, std::string_view name,
                                          const std::filesystem::path& cache_dir,
                                          const Transport& transport, const FetchOptions& opts = {}) {
  const auto target = cache_path(cache_dir, group, name);
  if (!opts.force && std::filesystem::exists(target)) return target;

  std::filesystem::create_directories(target.parent_path());
  auto lock_path = target;
  lock_path += ".lock";
  FileLock lock(lock_path);
  if (!opts.force && std::filesystem::exists(target)) return target;

  std::string base = opts.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::string url = base + "/MM/" + std::string(group) + "/" + std::string(name) + ".tar.gz";
  const HttpResponse resp = transport(url);
  if (!resp.error.empty()) throw FetchError("GET " + url + " failed: " + resp.error, resp.status);
  if (resp.status != 200)
    throw FetchError("GET " + url + " returned HTTP " + std::to_string(resp.status), resp.status);

  const auto member = extract_tar_member(gunzip(resp.body), std::string(name) + ".mtx");
  if (!member) throw ArchiveFormatError("archive " + url + " has no member " + std::string(name) + ".mtx");

  if (std::filesystem::exists(target)) {
    const auto old = read_file(target);
    if ((old.size() != member->size() || fnv1a(old) != fnv1a(*member)) && opts.warn)
      *opts.warn << "warning: cache conflict for " << target.string()
                 << ": re-downloaded file differs (size " << old.size() << " -> " << member->size()
                 << "); replacing\n";
  }
  write_file_atomic(target, *member);
  return target;
}

}  // namespace adkrylov
