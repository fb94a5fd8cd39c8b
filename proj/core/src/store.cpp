#include "sigma_lab/store.hpp"

#include <charconv>
#include <sstream>

namespace sigma_lab {

namespace {

bool is_decimal(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s.front() == '0')) return false;
    for (const char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const std::size_t next = line.find(' ', pos);
        const std::size_t end = next == std::string_view::npos ? line.size() : next;
        out.push_back(line.substr(pos, end - pos));
        pos = end + 1;
        if (next == std::string_view::npos) break;
        if (pos == line.size()) out.emplace_back();  // trailing space
    }
    return out;
}

}  // namespace

std::string format_cache_line(const Factorization& f) {
    std::string line = f.value().get_str();
    for (const auto& part : f.parts()) {
        line += ' ';
        line += part.prime.get_str();
        line += '^';
        line += std::to_string(part.exponent);
    }
    return line;
}

Factorization to_factorization(const CacheEntry& entry) {
    if (!is_decimal(entry.value)) throw CorruptEntry("value is not a positive decimal integer");
    const Integer value(entry.value);
    if (value < 1) throw CorruptEntry("value must be positive");
    std::vector<PrimePower> parts;
    parts.reserve(entry.parts.size());
    for (const auto& [prime, exponent] : entry.parts) {
        if (!is_decimal(prime)) throw CorruptEntry("prime '" + prime + "' is not decimal");
        parts.push_back(PrimePower{Integer(prime), exponent});
    }
    try {
        return Factorization::checked(value, std::move(parts));
    } catch (const InvalidFactorization& e) {
        throw CorruptEntry(e.what());
    }
}

Factorization parse_cache_line(std::string_view line) {
    const auto fields = split_spaces(line);
    if (fields.empty() || fields.front().empty()) throw CorruptEntry("empty line");
    CacheEntry entry;
    entry.value = std::string(fields.front());
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto field = fields[i];
        const auto caret = field.find('^');
        if (caret == std::string_view::npos) throw CorruptEntry("part '" + std::string(field) + "' lacks '^'");
        const auto exp_text = field.substr(caret + 1);
        std::uint32_t exponent = 0;
        const auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size() || exp_text.empty())
            throw CorruptEntry("bad exponent in '" + std::string(field) + "'");
        entry.parts.emplace_back(std::string(field.substr(0, caret)), exponent);
    }
    return to_factorization(entry);
}

FactorCache::FactorCache(std::filesystem::path path) : path_(std::move(path)) {
    std::unique_lock lock(mutex_);
    load_locked();
}

void FactorCache::load_locked() {
    entries_.clear();
    corrupt_.clear();
    std::ifstream in(*path_, std::ios::binary);
    if (!in) return;
    const std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    std::size_t line_number = 0;
    while (pos < contents.size()) {
        ++line_number;
        const std::size_t end = contents.find('\n', pos);
        if (end == std::string::npos) {
            corrupt_.push_back({line_number, "unterminated final line"});
            break;
        }
        const std::string_view line(contents.data() + pos, end - pos);
        pos = end + 1;
        try {
            Factorization f = parse_cache_line(line);
            entries_.insert_or_assign(f.value(), std::move(f));
        } catch (const CorruptEntry& e) {
            corrupt_.push_back({line_number, e.what()});
        }
    }
}

std::optional<Factorization> FactorCache::lookup(const Integer& value) const {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(value); it != entries_.end()) return it->second;
    return std::nullopt;
}

bool FactorCache::insert(const Factorization& f) {
    {
        std::unique_lock lock(mutex_);
        if (!entries_.emplace(f.value(), f).second) return false;
    }
    if (!path_) return true;
    const std::string line = format_cache_line(f) + '\n';
    std::lock_guard writer_lock(writer_mutex_);
    if (!writer_.is_open()) {
        bool needs_newline = false;
        if (std::ifstream existing(*path_, std::ios::binary | std::ios::ate); existing && existing.tellg() > 0) {
            existing.seekg(-1, std::ios::end);
            needs_newline = existing.get() != '\n';
        }
        writer_.open(*path_, std::ios::binary | std::ios::app);
        if (!writer_) throw IoFailure("cannot open cache file " + path_->string());
        // Terminate a torn tail so it cannot swallow the next entry.
        if (needs_newline) writer_.put('\n');
    }
    writer_.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!writer_) throw IoFailure("write to cache file " + path_->string() + " failed");
    return true;
}

bool FactorCache::insert(const CacheEntry& entry) { return insert(to_factorization(entry)); }

void FactorCache::flush() {
    std::lock_guard writer_lock(writer_mutex_);
    if (writer_.is_open()) {
        writer_.flush();
        if (!writer_) throw IoFailure("flush of cache file failed");
    }
}

void FactorCache::reload() {
    if (!path_) return;
    flush();
    std::unique_lock lock(mutex_);
    load_locked();
}

void FactorCache::save_as(const std::filesystem::path& path) const {
    auto temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open " + temp.string());
        std::shared_lock lock(mutex_);
        for (const auto& [value, f] : entries_) out << format_cache_line(f) << '\n';
        out.flush();
        if (!out) throw IoFailure("write to " + temp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) throw IoFailure("rename to " + path.string() + " failed: " + ec.message());
}

std::size_t FactorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<CorruptLine> FactorCache::corrupt_lines() const {
    std::shared_lock lock(mutex_);
    return corrupt_;
}

std::optional<Factorization> SnapshotSource::lookup(const Integer& value) const {
    return cache_.lookup(value);
}

void SnapshotSource::remember(const Factorization& f) {
    std::lock_guard lock(pending_mutex_);
    pending_.emplace(f.value(), f);
}

std::size_t SnapshotSource::commit() {
    std::lock_guard lock(pending_mutex_);
    std::size_t written = 0;
    for (const auto& [value, f] : pending_) written += cache_.insert(f) ? 1 : 0;
    pending_.clear();
    cache_.flush();
    return written;
}

}  // namespace sigma_lab
