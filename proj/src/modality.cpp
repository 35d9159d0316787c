#include "qpr/modality.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qpr/errors.hpp"
#include "qpr/rng.hpp"

namespace qpr {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw domain_error("sample is empty");
    for (double v : values_)
        if (!std::isfinite(v)) throw domain_error("sample contains a non-finite value");
    std::sort(values_.begin(), values_.end());
}

double dip_statistic(const Sample& s) { return dip_statistic_sorted(s.values()); }

// Port of Hartigan & Hartigan's DIPTST (AS 217) in the form maintained for R's
// diptest package. Arrays are 1-based to stay close to the reference; the dip
// is tracked in units of 1/(2n) until the end.
double dip_statistic_sorted(std::span<const double> sorted) {
    const int n = static_cast<int>(sorted.size());
    if (sorted.size() < kMinModalitySample)
        throw domain_error("dip statistic needs at least 4 values");

    std::vector<double> x(n + 1);
    std::copy(sorted.begin(), sorted.end(), x.begin() + 1);

    int low = 1;
    int high = n;
    double dip = 1.0;
    if (x[n] == x[1]) return dip / (2.0 * n);

    std::vector<int> mn(n + 1), mj(n + 1), gcm(n + 2), lcm(n + 2);

    // index chains for the convex minorant
    mn[1] = 1;
    for (int j = 2; j <= n; ++j) {
        mn[j] = j - 1;
        for (;;) {
            const int mnj = mn[j];
            const int mnmnj = mn[mnj];
            if (mnj == 1 || (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj)) break;
            mn[j] = mnmnj;
        }
    }
    // and for the concave majorant
    mj[n] = n;
    for (int k = n - 1; k >= 1; --k) {
        mj[k] = k + 1;
        for (;;) {
            const int mjk = mj[k];
            const int mjmjk = mj[mjk];
            if (mjk == n || (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk)) break;
            mj[k] = mjmjk;
        }
    }

    for (;;) {
        // GCM change points from high down to low
        gcm[1] = high;
        int i = 1;
        while (gcm[i] > low) {
            gcm[i + 1] = mn[gcm[i]];
            ++i;
        }
        int ig = i;
        const int l_gcm = ig;
        int ix = ig - 1;

        // LCM change points from low up to high
        lcm[1] = low;
        i = 1;
        while (lcm[i] < high) {
            lcm[i + 1] = mj[lcm[i]];
            ++i;
        }
        int ih = i;
        const int l_lcm = ih;
        int iv = 2;

        // largest distance between GCM and LCM on [low, high]
        double d = 0.0;
        if (l_gcm != 2 || l_lcm != 2) {
            do {
                const int gcmix = gcm[ix];
                const int lcmiv = lcm[iv];
                if (gcmix > lcmiv) {
                    const int gcmi1 = gcm[ix + 1];
                    const double dx = (lcmiv - gcmi1 + 1) -
                                      (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) / (x[gcmix] - x[gcmi1]);
                    ++iv;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    const int lcmiv1 = lcm[iv - 1];
                    const double dx = (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1) /
                                          (x[lcmiv] - x[lcmiv1]) -
                                      (gcmix - lcmiv1 - 1);
                    --ix;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                if (ix < 1) ix = 1;
                if (iv > l_lcm) iv = l_lcm;
            } while (gcm[ix] != lcm[iv]);
        } else {
            d = 1.0;
        }

        if (d < dip) break;

        // dip of the convex minorant part
        double dip_l = 0.0;
        for (int j = ig; j < l_gcm; ++j) {
            double max_t = 1.0;
            const int jb = gcm[j + 1];
            const int je = gcm[j];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double c = (je - jb) / (x[je] - x[jb]);
                for (int jj = jb; jj <= je; ++jj) {
                    const double t = (jj - jb + 1) - (x[jj] - x[jb]) * c;
                    max_t = std::max(max_t, t);
                }
            }
            dip_l = std::max(dip_l, max_t);
        }

        // dip of the concave majorant part
        double dip_u = 0.0;
        for (int j = ih; j < l_lcm; ++j) {
            double max_t = 1.0;
            const int jb = lcm[j];
            const int je = lcm[j + 1];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double c = (je - jb) / (x[je] - x[jb]);
                for (int jj = jb; jj <= je; ++jj) {
                    const double t = (x[jj] - x[jb]) * c - (jj - jb - 1);
                    max_t = std::max(max_t, t);
                }
            }
            dip_u = std::max(dip_u, max_t);
        }

        dip = std::max(dip, std::max(dip_l, dip_u));

        // without this check the loop can cycle forever
        if (low == gcm[ig] && high == lcm[ih]) break;
        low = gcm[ig];
        high = lcm[ih];
    }
    return dip / (2.0 * n);
}

ModalityVerdict modality_pvalue(const Sample& s, int n_boot, std::uint64_t seed, unsigned threads) {
    if (s.size() < kMinModalitySample) throw domain_error("modality test needs at least 4 values");
    if (n_boot < 1) throw domain_error("n_boot must be at least 1");

    ModalityVerdict verdict;
    verdict.statistic = dip_statistic(s);
    verdict.n_boot = n_boot;
    verdict.seed = seed;

    const std::size_t n = s.size();
    std::vector<char> exceeds(static_cast<std::size_t>(n_boot), 0);
    auto replicate_range = [&](int first, int last) {
        std::vector<double> draw(n);
        for (int b = first; b < last; ++b) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
            for (auto& v : draw) v = rng.uniform();
            std::sort(draw.begin(), draw.end());
            exceeds[b] = dip_statistic_sorted(draw) >= verdict.statistic ? 1 : 0;
        }
    };

    const unsigned workers = std::clamp(threads, 1u, static_cast<unsigned>(n_boot));
    if (workers == 1) {
        replicate_range(0, n_boot);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int first = static_cast<int>(static_cast<long long>(n_boot) * w / workers);
            const int last = static_cast<int>(static_cast<long long>(n_boot) * (w + 1) / workers);
            pool.emplace_back(replicate_range, first, last);
        }
    }

    int count = 0;
    for (char e : exceeds) count += e;
    verdict.p_value = (1.0 + count) / (n_boot + 1.0);
    return verdict;
}

}  // namespace qpr
