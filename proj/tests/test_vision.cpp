#include <gtest/gtest.h>

#include <random>

#include "gelpad/vision.hpp"
#include "support.hpp"

using namespace gelpad;

TEST(Sobel, ConstantImageHasZeroGradient) {
    GrayImage img(10, 8, 128);
    const auto g = sobel(img);
    for (double m : g.magnitude.buffer()) EXPECT_EQ(m, 0.0);
}

TEST(Sobel, VerticalStep) {
    GrayImage img(10, 6, 0);
    for (int y = 0; y < 6; ++y) {
        for (int x = 5; x < 10; ++x) img(x, y) = 255;
    }
    const auto g = sobel(img);
    for (int y = 1; y < 5; ++y) {
        int best = 0;
        for (int x = 0; x < 10; ++x) {
            if (std::abs(g.gx(x, y)) > std::abs(g.gx(best, y))) best = x;
            EXPECT_EQ(g.gy(x, y), 0);
        }
        EXPECT_TRUE(best == 4 || best == 5);
        EXPECT_EQ(g.gx(4, y), 4 * 255);
        EXPECT_EQ(g.gx(5, y), 4 * 255);
    }
}

TEST(Sobel, MatchesDirectConvolution) {
    for (std::uint32_t seed = 1; seed <= 4; ++seed) {
        const GrayImage img = test::random_image(16, 16, seed);
        const auto g = sobel(img);
        const auto o = test::naive_sobel(img);
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                const auto i = static_cast<std::size_t>(y * 16 + x);
                ASSERT_EQ(g.gx(x, y), o.gx[i]);
                ASSERT_EQ(g.gy(x, y), o.gy[i]);
                const double mag = std::sqrt(double(o.gx[i] * o.gx[i] + o.gy[i] * o.gy[i]));
                ASSERT_NEAR(g.magnitude(x, y), mag, 1e-6 * std::max(1.0, mag));
            }
        }
    }
}

TEST(Sobel, LinearInInterior) {
    const GrayImage a = test::random_image(12, 12, 5, 0, 100);
    const GrayImage b = test::random_image(12, 12, 6, 0, 100);
    GrayImage sum(12, 12);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.buffer()[i] = a.buffer()[i] + b.buffer()[i];
    const auto ga = sobel(a), gb = sobel(b), gs = sobel(sum);
    for (int y = 1; y < 11; ++y) {
        for (int x = 1; x < 11; ++x) {
            EXPECT_EQ(gs.gx(x, y), ga.gx(x, y) + gb.gx(x, y));
            EXPECT_EQ(gs.gy(x, y), ga.gy(x, y) + gb.gy(x, y));
        }
    }
}

TEST(Sobel, RejectsTinyImage) { EXPECT_THROW(sobel(GrayImage(2, 5)), std::invalid_argument); }

TEST(Gaussian, SigmaZeroIsIdentity) {
    const GrayImage img = test::random_image(9, 7, 2);
    const RealImage out = gaussian_blur(img, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(out.buffer()[i], img.buffer()[i]);
    EXPECT_THROW(gaussian_blur(img, -1.0), std::invalid_argument);
}

TEST(Gaussian, ImpulseReproducesKernel) {
    GrayImage img(31, 31, 0);
    img(15, 15) = 255;
    const double sigma = 1.5;
    const RealImage out = gaussian_blur(img, sigma);
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    double ksum = 0.0;
    for (double v : k) ksum += v;
    EXPECT_NEAR(ksum, 1.0, 1e-12);
    for (int i = -r; i <= r; ++i) {
        const double expect = 255.0 * k[static_cast<std::size_t>(i + r)] * k[static_cast<std::size_t>(r)];
        EXPECT_NEAR(out(15 + i, 15), expect, 1e-9);
        EXPECT_NEAR(out(15, 15 + i), expect, 1e-9);
    }
}

TEST(Gaussian, MatchesNaiveTwoDimensional) {
    const GrayImage img = test::random_image(24, 20, 11);
    const RealImage fast = gaussian_blur(img, 2.0);
    const RealImage slow = test::naive_gaussian(img, 2.0);
    for (std::size_t i = 0; i < fast.size(); ++i) ASSERT_NEAR(fast.buffer()[i], slow.buffer()[i], 1e-9);
}

TEST(Integral, AllOnesFullWindow) {
    const IntegralImage ii(GrayImage(4, 4, 1));
    EXPECT_EQ(ii.rect_sum(0, 0, 3, 3), 16);
}

TEST(Integral, SinglePixelWindow) {
    const GrayImage img = test::random_image(8, 8, 4);
    const IntegralImage ii(img);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) EXPECT_EQ(ii.rect_sum(x, y, x, y), img(x, y));
    }
}

TEST(Integral, RandomWindowsMatchNaiveSums) {
    const GrayImage img = test::random_image(128, 128, 8);
    const IntegralImage ii = integral(img);
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> c(-20, 147);
    for (int k = 0; k < 1000; ++k) {
        int x0 = c(rng), x1 = c(rng), y0 = c(rng), y1 = c(rng);
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        ASSERT_EQ(ii.rect_sum(x0, y0, x1, y1), test::naive_rect_sum(img, x0, y0, x1, y1))
            << x0 << "," << y0 << "," << x1 << "," << y1;
        const auto n = IntegralImage::rect_count(x0, y0, x1, y1, 128, 128);
        if (n > 0) {
            const double mean = static_cast<double>(ii.rect_sum(x0, y0, x1, y1)) / n;
            const double naive = static_cast<double>(test::naive_rect_sum(img, x0, y0, x1, y1)) / n;
            ASSERT_EQ(mean, naive);
        }
    }
}

TEST(Components, SinglePixel) {
    Mask m(5, 5, 0);
    m(2, 3) = 255;
    const auto blobs = connected_components(m);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_EQ(blobs[0].area, 1);
    EXPECT_EQ(blobs[0].perimeter, 4);
    EXPECT_EQ(blobs[0].centroid().x, 2.0);
    EXPECT_EQ(blobs[0].centroid().y, 3.0);
}

TEST(Components, TwoByTwoSquare) {
    Mask m(6, 6, 0);
    for (int y = 2; y < 4; ++y) {
        for (int x = 1; x < 3; ++x) m(x, y) = 1;
    }
    const auto blobs = connected_components(m);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_EQ(blobs[0].area, 4);
    EXPECT_EQ(blobs[0].perimeter, 8);
    EXPECT_DOUBLE_EQ(blobs[0].centroid().x, 1.5);
    EXPECT_DOUBLE_EQ(blobs[0].centroid().y, 2.5);
}

TEST(Components, DiagonalIsOneBlob) {
    Mask m(4, 4, 0);
    for (int i = 0; i < 4; ++i) m(i, i) = 1;
    const auto blobs = connected_components(m);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_EQ(blobs[0].area, 4);
    EXPECT_EQ(blobs[0].perimeter, 16);
}

TEST(Components, BorderEdgesCountAsPerimeter) {
    Mask m(3, 3, 1);
    const auto blobs = connected_components(m);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_EQ(blobs[0].perimeter, 12);
}

TEST(Components, MatchesFloodFillOracle) {
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
        const double density = 0.2 + 0.03 * seed;
        const Mask m = test::random_mask(64, 64, seed, density);
        const Labeling lab = label_components(m);
        const auto oracle = test::flood_fill_components(m);
        ASSERT_EQ(lab.blobs.size(), oracle.blobs.size()) << "seed " << seed;
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                ASSERT_EQ(lab.labels(x, y), oracle.labels[static_cast<std::size_t>(y * 64 + x)]);
            }
        }
        long total = 0, fg = 0;
        for (std::size_t i = 0; i < lab.blobs.size(); ++i) {
            const Blob& b = lab.blobs[i];
            const auto& o = oracle.blobs[i];
            EXPECT_EQ(b.label, static_cast<int>(i) + 1);
            EXPECT_EQ(b.area, o.area);
            EXPECT_EQ(b.perimeter, o.perimeter);
            EXPECT_EQ(b.bbox.xmin, o.xmin);
            EXPECT_EQ(b.bbox.ymin, o.ymin);
            EXPECT_EQ(b.bbox.xmax, o.xmax);
            EXPECT_EQ(b.bbox.ymax, o.ymax);
            EXPECT_GE(b.perimeter, 4);
            total += b.area;
        }
        for (auto v : m.buffer()) fg += v != 0;
        EXPECT_EQ(total, fg);
    }
}

TEST(Downscale, BlockMean) {
    GrayImage img(5, 3, 0);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 5; ++x) img(x, y) = static_cast<std::uint8_t>(x + 10 * y);
    }
    const RealImage d = downscale_mean(img, 2);
    ASSERT_EQ(d.width(), 3);
    ASSERT_EQ(d.height(), 2);
    EXPECT_DOUBLE_EQ(d(0, 0), (0 + 1 + 10 + 11) / 4.0);
    EXPECT_DOUBLE_EQ(d(2, 0), (4 + 14) / 2.0);
    EXPECT_DOUBLE_EQ(d(2, 1), 24.0);
}
