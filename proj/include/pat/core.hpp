#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pat {

using cplx = std::complex<double>;

enum class ErrorKind {
    parameter,     // invalid option or window specification
    range,         // argument outside the admissible domain
    validation,    // data violates a documented invariant
    precondition,  // input shape or layout not supported by the operation
    io,
    numerical,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

// Dense C-ordered array; the last axis varies fastest.
template <class T>
struct NdArray {
    std::vector<std::size_t> dims;
    std::vector<T> data;

    NdArray() = default;
    explicit NdArray(std::vector<std::size_t> d, T fill = T{}) : dims(std::move(d)), data(product(dims), fill) {}

    std::size_t size() const { return data.size(); }
    std::size_t ndim() const { return dims.size(); }
    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }
};

using RealArray = NdArray<double>;
using ComplexArray = NdArray<cplx>;

// Real image or volume. Axes are lateral first, depth last.
struct Field {
    RealArray values;
    std::vector<double> spacing;
    std::vector<double> origin;

    std::size_t ndim() const { return values.ndim(); }
    const std::vector<std::size_t>& dims() const { return values.dims; }
};

// Number of worker threads: PAT_THREADS if set, otherwise the hardware count.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks; the
// result must not depend on the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pat
