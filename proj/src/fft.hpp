#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

#include <fftw3.h>

namespace phasewalk::detail {

// FFTW's planner is not reentrant; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

/// Unnormalised complex DFT of fixed shape, executed on caller-provided buffers.
class ComplexFft {
public:
    // sign = FFTW_FORWARD (e^{-i...}) or FFTW_BACKWARD (e^{+i...})
    ComplexFft(std::size_t n0, std::size_t n1, int sign) : size_(n0 * (n1 == 0 ? 1 : n1)) {
        fftw_complex* scratch = fftw_alloc_complex(size_);
        std::lock_guard lock(fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        plan_ = n1 == 0 ? fftw_plan_dft_1d(static_cast<int>(n0), scratch, scratch, sign, flags)
                        : fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), scratch,
                                           scratch, sign, flags);
        fftw_free(scratch);
    }
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;
    ~ComplexFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    std::size_t size() const { return size_; }

    void execute(std::span<std::complex<double>> data) const {
        auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan_, ptr, ptr);
    }

private:
    std::size_t size_;
    fftw_plan plan_;
};

/// Real-to-half-complex forward DFT of length n (output has n/2 + 1 entries).
class RealForwardFft {
public:
    explicit RealForwardFft(std::size_t n) : n_(n) {
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
    }
    RealForwardFft(const RealForwardFft&) = delete;
    RealForwardFft& operator=(const RealForwardFft&) = delete;
    ~RealForwardFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    // `in` is not modified by an out-of-place r2c transform.
    void execute(std::span<const double> in, std::span<std::complex<double>> out) const {
        fftw_execute_dft_r2c(plan_, const_cast<double*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()));
    }

private:
    std::size_t n_;
    fftw_plan plan_;
};

/// Half-complex-to-real backward DFT of length n. Destroys its input.
class RealBackwardFft {
public:
    explicit RealBackwardFft(std::size_t n) : n_(n) {
        double* out = fftw_alloc_real(n);
        fftw_complex* in = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
    }
    RealBackwardFft(const RealBackwardFft&) = delete;
    RealBackwardFft& operator=(const RealBackwardFft&) = delete;
    ~RealBackwardFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    void execute(std::span<std::complex<double>> in, std::span<double> out) const {
        fftw_execute_dft_c2r(plan_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    }

private:
    std::size_t n_;
    fftw_plan plan_;
};

} // namespace phasewalk::detail
