#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spoofsynth/deform.hpp"

using namespace spoofsynth;
using std::numbers::pi;

namespace {

Mesh3D row_mesh(double l, double h, int columns, int rows = 2) { return build_planar_mesh({l, h}, {columns, rows}); }

double max_pairwise_error(const Mesh3D& a, const Mesh3D& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < a.vertices.size(); ++j) {
            const double da = norm(a.vertices[i] - a.vertices[j]);
            const double db = norm(b.vertices[i] - b.vertices[j]);
            worst = std::max(worst, std::abs(da - db) / std::max(da, 1e-300));
        }
    }
    return worst;
}

} // namespace

TEST(BendVertical, EdgeVertexQuarterTurn)
{
    const Mesh3D m = bend_vertical(row_mesh(200, 100, 3), pi / 2);
    const Vec3 edge = m.vertices[m.index(2, 0)];
    EXPECT_NEAR(edge.x, 400 / pi * std::sin(pi / 4), 1e-12);
    EXPECT_NEAR(edge.x, 90.0316, 1e-4);
    EXPECT_EQ(edge.z, 0.0);
}

TEST(BendVertical, CenterVertexQuarterTurn)
{
    const Mesh3D m = bend_vertical(row_mesh(200, 100, 3), pi / 2);
    const Vec3 center = m.vertices[m.index(1, 0)];
    EXPECT_EQ(center.x, 0.0);
    EXPECT_NEAR(center.z, 400 / pi * (1 - std::cos(pi / 4)), 1e-12);
    EXPECT_NEAR(center.z, 37.2923, 1e-4);
}

TEST(BendVertical, MatchesDirectEvaluation)
{
    for (double l : {100.0, 200.0, 377.0}) {
        for (double deg : {30.0, 45.0, 60.0, 90.0, 180.0, 300.0}) {
            const double theta = deg * pi / 180;
            const Mesh3D flat = row_mesh(l, 50, 17);
            const Mesh3D m = bend_vertical(flat, theta);
            for (std::size_t i = 0; i < m.vertices.size(); ++i) {
                const auto ref = oracle::bend_direct(flat.vertices[i].x, l, theta);
                EXPECT_NEAR(m.vertices[i].x, ref.along, 1e-12 * l);
                EXPECT_NEAR(m.vertices[i].z, ref.depth, 1e-12 * l);
            }
        }
    }
}

TEST(BendVertical, FlatLimit)
{
    const Mesh3D flat = row_mesh(200, 80, 9, 3);
    const Mesh3D m = bend_vertical(flat, 1e-9);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        EXPECT_NEAR(m.vertices[i].x, flat.vertices[i].x - 100, 1e-6);
        EXPECT_EQ(m.vertices[i].y, flat.vertices[i].y);
        EXPECT_NEAR(m.vertices[i].z, 0.0, 1e-6);
    }
}

TEST(BendVertical, ContinuityNearZero)
{
    const double l = 250;
    const Mesh3D flat = row_mesh(l, 80, 33, 3);
    const Mesh3D m = bend_vertical(flat, 1e-6);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const Vec3 ref{flat.vertices[i].x - l / 2, flat.vertices[i].y, 0.0};
        worst = std::max(worst, norm(m.vertices[i] - ref));
    }
    EXPECT_LT(worst, 1e-5 * l);
}

TEST(BendVertical, YUntouchedAndUvsKept)
{
    const Mesh3D flat = row_mesh(120, 70, 8, 6);
    const Mesh3D m = bend_vertical(flat, 1.1);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        EXPECT_EQ(m.vertices[i].y, flat.vertices[i].y);
    }
    EXPECT_EQ(m.uvs, flat.uvs);
    EXPECT_EQ(m.triangles, flat.triangles);
}

TEST(BendVertical, ArcLengthConverges)
{
    for (double deg : {10.0, 30.0, 45.0, 60.0, 90.0}) {
        for (auto [cols, tol] : {std::pair{32, 1e-3}, std::pair{128, 1e-4}}) {
            const double l = 200;
            const Mesh3D m = bend_vertical(row_mesh(l, 50, cols), deg * pi / 180);
            double length = 0.0;
            for (int i = 0; i + 1 < cols; ++i) {
                length += norm(m.vertices[m.index(i + 1, 0)] - m.vertices[m.index(i, 0)]);
            }
            EXPECT_LE(std::abs(length - l) / l, tol) << deg << " deg, " << cols << " columns";
        }
    }
}

TEST(BendVertical, GeodesicDistanceExact)
{
    const double l = 160, theta = 1.3, r = l / theta;
    const Mesh3D flat = row_mesh(l, 40, 9);
    const Mesh3D m = bend_vertical(flat, theta);
    for (int i = 0; i < 9; ++i) {
        for (int j = i + 1; j < 9; ++j) {
            const Vec3 a = m.vertices[m.index(i, 0)], b = m.vertices[m.index(j, 0)];
            // Angle subtended on the cylinder whose axis sits at depth r - r cos(theta/2) behind the plane.
            const double axis_z = -r * std::cos(theta / 2);
            const double pa = std::atan2(a.x, a.z - axis_z);
            const double pb = std::atan2(b.x, b.z - axis_z);
            EXPECT_NEAR(r * std::abs(pa - pb), std::abs(flat.vertices[m.index(i, 0)].x - flat.vertices[m.index(j, 0)].x),
                        1e-9 * l);
        }
    }
}

TEST(BendHorizontal, EdgeAndCenter)
{
    const Mesh3D flat = build_planar_mesh({100, 150}, {2, 3});
    const Mesh3D half = bend_horizontal(flat, pi);
    const Vec3 edge = half.vertices[half.index(0, 2)];
    EXPECT_NEAR(edge.y, 150 / pi, 1e-12);
    EXPECT_NEAR(edge.y, 47.7464, 1e-4);
    EXPECT_EQ(edge.z, 0.0);

    const Mesh3D third = bend_horizontal(flat, pi / 3);
    const Vec3 center = third.vertices[third.index(0, 1)];
    EXPECT_EQ(center.y, 0.0);
    EXPECT_NEAR(center.z, 450 / pi * (1 - std::cos(pi / 6)), 1e-12);
    EXPECT_NEAR(center.z, 19.1904, 1e-4);
    for (std::size_t i = 0; i < flat.vertices.size(); ++i) {
        EXPECT_EQ(third.vertices[i].x, flat.vertices[i].x);
    }
}

TEST(BendHorizontal, FlatLimit)
{
    const Mesh3D flat = build_planar_mesh({60, 150}, {3, 9});
    const Mesh3D m = bend_horizontal(flat, 1e-9);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        EXPECT_NEAR(m.vertices[i].y, flat.vertices[i].y - 75, 1e-6);
        EXPECT_NEAR(m.vertices[i].z, 0.0, 1e-6);
    }
}

TEST(Bend, EdgeColumnsStayAtZeroDepth)
{
    for (double deg = 5; deg < 360; deg += 17) {
        const Mesh3D m = bend_vertical(row_mesh(377, 50, 5, 4), deg * pi / 180);
        for (int j = 0; j < 4; ++j) {
            EXPECT_EQ(m.vertices[m.index(0, j)].z, 0.0);
            EXPECT_EQ(m.vertices[m.index(4, j)].z, 0.0);
        }
    }
}

TEST(Bend, InvalidTheta)
{
    const Mesh3D m = row_mesh(100, 50, 4);
    for (double t : {0.0, -0.1, 2 * pi, 7.0, std::nan("")}) {
        try {
            bend_vertical(m, t);
            ADD_FAILURE() << t;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidTheta);
        }
        EXPECT_THROW(bend_horizontal(m, t), Error);
    }
}

TEST(Bend, NotPlanarUnlessAllowed)
{
    const Mesh3D once = bend_vertical(row_mesh(100, 50, 6, 6), 0.8);
    try {
        bend_horizontal(once, 0.8);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPlanar);
    }
    const Mesh3D twice = bend_horizontal(once, 0.8, {.allow_nonplanar = true});
    const Mesh3D other = bend_horizontal(row_mesh(100, 50, 6, 6), 0.8);
    for (std::size_t i = 0; i < twice.vertices.size(); ++i) {
        EXPECT_DOUBLE_EQ(twice.vertices[i].z, once.vertices[i].z + other.vertices[i].z);
    }
}

TEST(Rotate, ZeroIsExactCopy)
{
    const Mesh3D m = bend_vertical(row_mesh(90, 40, 5, 5), 0.5);
    const Mesh3D r = rotate(m, {});
    EXPECT_EQ(r.vertices, m.vertices);
}

TEST(Rotate, QuarterYaw)
{
    const Mat3 r = rotation_matrix({pi / 2, 0, 0});
    const Vec3 v = r * Vec3{1, 0, 0};
    EXPECT_NEAR(v.x, 0.0, 1e-15);
    EXPECT_NEAR(v.y, 0.0, 1e-15);
    EXPECT_NEAR(v.z, -1.0, 1e-15);
}

TEST(Rotate, CompositionOrder)
{
    const RotationSpec s{0.3, -0.2, 0.7};
    const Mat3 expected = rotation_matrix({0.3, 0, 0}) * rotation_matrix({0, -0.2, 0}) * rotation_matrix({0, 0, 0.7});
    const Mat3 r = rotation_matrix(s);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(r.m[i], expected.m[i], 1e-15);
    }
}

TEST(Rotate, OrthonormalAndProper)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a(-pi, pi);
    for (int k = 0; k < 100; ++k) {
        const Mat3 r = rotation_matrix({a(rng), a(rng), a(rng)});
        const Mat3 p = r * r.transposed();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                EXPECT_NEAR(p(i, j), i == j ? 1.0 : 0.0, 1e-12);
            }
        }
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
}

TEST(Rotate, PreservesDistancesAndCentroid)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-pi, pi);
    const Mesh3D m = bend_vertical(row_mesh(120, 80, 5, 5), 1.0);
    for (int k = 0; k < 20; ++k) {
        const Mesh3D r = rotate(m, {a(rng), a(rng), a(rng)});
        EXPECT_LE(max_pairwise_error(m, r), 1e-9);
        const Vec3 c0 = m.centroid(), c1 = r.centroid();
        EXPECT_NEAR(norm(c1 - c0), 0.0, 1e-9);
        EXPECT_EQ(r.uvs, m.uvs);
    }
}

TEST(Rotate, NonFiniteAngle)
{
    EXPECT_THROW(rotate(row_mesh(10, 10, 2), {std::nan(""), 0, 0}), Error);
}
