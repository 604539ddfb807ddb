#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include <capt/capt.hpp>
#include <capt/io.hpp>

// Binary dump of a tree, little-endian throughout:
//
//   char[8]   magic "CAPT0001"
//   u32       k
//   u64       n                      (leaves, power of two)
//   f32 f32   r_min r_max
//   f32       T[n - 1]
//   f32       A[n][2k]               (lo[0..k) then hi[0..k) per leaf)
//   u64       offsets[n + 1]         (points, not floats)
//   f32       values[k * offsets[n]] (per set: all axis-0 coords, then axis 1, ...)
namespace capt
{
    inline constexpr std::string_view dump_magic = "CAPT0001";

    namespace detail
    {
        class ByteWriter
        {
        public:
            void raw(std::string_view bytes) { out_.append(bytes); }

            void u32(std::uint32_t v)
            {
                for (int i = 0; i < 4; ++i)
                {
                    out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
                }
            }

            void u64(std::uint64_t v)
            {
                for (int i = 0; i < 8; ++i)
                {
                    out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
                }
            }

            void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

            std::string take() && { return std::move(out_); }

        private:
            std::string out_;
        };

        class ByteReader
        {
        public:
            explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

            std::string_view raw(std::size_t count)
            {
                need(count);
                const auto out = bytes_.substr(pos_, count);
                pos_ += count;
                return out;
            }

            std::uint32_t u32()
            {
                need(4);
                std::uint32_t v = 0;
                for (int i = 0; i < 4; ++i)
                {
                    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
                }
                pos_ += 4;
                return v;
            }

            std::uint64_t u64()
            {
                need(8);
                std::uint64_t v = 0;
                for (int i = 0; i < 8; ++i)
                {
                    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
                }
                pos_ += 8;
                return v;
            }

            float f32() { return std::bit_cast<float>(u32()); }

            [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

            /// Throws unless `count` items of `width` bytes are still available.
            void expect(std::uint64_t count, std::uint64_t width) const
            {
                if (width != 0 && count > remaining() / width)
                {
                    throw Error(ErrorCode::format, "tree dump is truncated");
                }
            }

        private:
            void need(std::size_t count) const
            {
                if (count > remaining())
                {
                    throw Error(ErrorCode::format, "tree dump is truncated");
                }
            }

            std::string_view bytes_;
            std::size_t pos_ = 0;
        };
    }  // namespace detail

    template <std::size_t K>
    [[nodiscard]] std::string dump(const Capt<K> &tree)
    {
        detail::ByteWriter w;
        w.raw(dump_magic);
        w.u32(static_cast<std::uint32_t>(K));
        w.u64(tree.size());
        w.f32(tree.r_min());
        w.f32(tree.r_max());
        for (float t : tree.tests())
        {
            w.f32(t);
        }
        for (const auto &box : tree.boxes())
        {
            for (float v : box.lo)
            {
                w.f32(v);
            }
            for (float v : box.hi)
            {
                w.f32(v);
            }
        }
        for (auto off : tree.offsets())
        {
            w.u64(off);
        }
        for (float v : tree.values())
        {
            w.f32(v);
        }
        return std::move(w).take();
    }

    template <std::size_t K>
    [[nodiscard]] Capt<K> load(std::string_view bytes)
    {
        detail::ByteReader r(bytes);
        if (bytes.size() < dump_magic.size() || r.raw(dump_magic.size()) != dump_magic)
        {
            throw Error(ErrorCode::format, "not a tree dump (bad magic)");
        }

        const std::uint32_t k = r.u32();
        if (k != K)
        {
            throw Error(
                ErrorCode::dimension_mismatch,
                "tree dump has dimension " + std::to_string(k) + ", expected " + std::to_string(K));
        }

        const std::uint64_t n = r.u64();
        if (n == 0 || !std::has_single_bit(n))
        {
            throw Error(ErrorCode::format, "leaf count must be a nonzero power of two");
        }
        const float r_min = r.f32();
        const float r_max = r.f32();

        r.expect(n - 1, 4);
        std::vector<float> tests(n - 1);
        for (auto &t : tests)
        {
            t = r.f32();
        }

        r.expect(n, 8 * K);
        std::vector<Aabb<K>> boxes(n);
        for (auto &box : boxes)
        {
            for (auto &v : box.lo)
            {
                v = r.f32();
            }
            for (auto &v : box.hi)
            {
                v = r.f32();
            }
        }

        r.expect(n + 1, 8);
        std::vector<std::uint64_t> offsets(n + 1);
        for (auto &off : offsets)
        {
            off = r.u64();
        }
        for (std::size_t j = 0; j < n; ++j)
        {
            if (offsets[j + 1] < offsets[j])
            {
                throw Error(ErrorCode::format, "affordance offsets are not monotone");
            }
        }

        r.expect(offsets.back(), 4 * K);
        std::vector<float> values(K * offsets.back());
        for (auto &v : values)
        {
            v = r.f32();
        }

        if (r.remaining() != 0)
        {
            throw Error(ErrorCode::format, "trailing bytes after tree dump");
        }

        return Capt<K>(r_min, r_max, std::move(tests), std::move(boxes), std::move(offsets), std::move(values));
    }

    template <std::size_t K>
    void save(const Capt<K> &tree, const std::filesystem::path &path)
    {
        io::write_file(path, dump(tree));
    }

    template <std::size_t K>
    [[nodiscard]] Capt<K> load_file(const std::filesystem::path &path)
    {
        return load<K>(io::read_file(path));
    }
}  // namespace capt
