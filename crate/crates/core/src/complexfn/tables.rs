//! Constant tables: even Bernoulli numbers, Stieltjes constants and the
//! Taylor coefficients of the Riemann-Siegel kernel.
//!
//! Values were rendered from exact rationals / 200-digit evaluations and
//! rounded to binary64.

use num_complex::Complex64;

const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `B_2, B_4, ..., B_60`; `BERNOULLI_EVEN[k - 1] = B_{2k}`.
pub const BERNOULLI_EVEN: [f64; 30] = [
    1.6666666666666667e-1,
    -3.3333333333333333e-2,
    2.380952380952381e-2,
    -3.3333333333333333e-2,
    7.5757575757575758e-2,
    -2.5311355311355311e-1,
    1.1666666666666667,
    -7.092156862745098,
    5.4971177944862155e+1,
    -5.2912424242424242e+2,
    6.1921231884057971e+3,
    -8.6580253113553114e+4,
    1.4255171666666667e+6,
    -2.7298231067816092e+7,
    6.0158087390064237e+8,
    -1.5116315767092157e+10,
    4.2961464306116667e+11,
    -1.3711655205088333e+13,
    4.8833231897359317e+14,
    -1.9296579341940068e+16,
    8.4169304757368262e+17,
    -4.0338071854059455e+19,
    2.1150748638081992e+21,
    -1.2086626522296526e+23,
    7.5008667460769644e+24,
    -5.0387781014810689e+26,
    3.6528776484818123e+28,
    -2.8498769302450882e+30,
    2.3865427499683628e+32,
    -2.1399949257225334e+34,
];

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Stieltjes constants `gamma_1`, `gamma_2` in `zeta(1 + c) = 1/c + sum (-1)^n gamma_n c^n / n!`.
pub const STIELTJES_1: f64 = -0.072_815_845_483_676_724_86;
pub const STIELTJES_2: f64 = -0.009_690_363_192_872_318_485;

/// Taylor coefficients `c_{2n}`, `n = 0..60`, of the even entire function
/// `F(z) = (exp(i pi (z^2/2 + 3/8)) - i sqrt(2) cos(pi z / 2)) / (2 cos(pi z))`.
pub const RS_KERNEL_TAYLOR: [Complex64; 60] = [
    c64(1.9134171618254489e-1, -2.4516701493090415e-1),
    c64(2.1862023403876022e-1, -3.6933834884962953e-2),
    c64(6.6188287740171762e-2, 6.3534393856146029e-2),
    c64(-6.8025130238370943e-3, 2.7223912663570067e-2),
    c64(-6.7838109850517904e-3, 1.385760877106652e-3),
    c64(-8.1186266157223264e-4, -1.189449446101378e-3),
    c64(1.4852676866689845e-4, -2.1269820192893324e-4),
    c64(3.9716504397607348e-5, 1.1171327401990151e-5),
    c64(2.3278062307252253e-7, 5.8728583986520697e-6),
    c64(-7.1636258154775529e-7, 2.4982125529235179e-7),
    c64(-5.177423556156473e-8, -7.3087003051015519e-8),
    c64(6.178963541930869e-9, -7.5367914481640208e-9),
    c64(8.9405419289774525e-10, 4.1044257973312286e-10),
    c64(-1.695707194963518e-11, 9.1065595502940845e-11),
    c64(-8.1633169512829526e-12, 4.3480990952496189e-13),
    c64(-1.8925546592706102e-13, -6.52091326154013e-13),
    c64(4.6637116296008624e-14, -2.5746988391948219e-14),
    c64(2.6109215079890684e-15, 2.9783351960862872e-15),
    c64(-1.6753365363721319e-16, 2.2417569641965171e-16),
    c64(-1.7062132614058632e-17, -7.9936613787734565e-18),
    c64(2.8756016707161996e-19, -1.1768943516467545e-18),
    c64(7.4476506816057527e-20, 3.424141569957982e-21),
    c64(6.2826863585107084e-22, 4.3544324656780059e-21),
    c64(-2.3606476250717128e-22, 8.0426770108750665e-23),
    c64(-6.63453468151981e-24, -1.187404814328495e-23),
    c64(5.5267199975607092e-25, -4.5338735224994205e-25),
    c64(2.7498231887637328e-26, 2.3622132419636894e-26),
    c64(-9.1156882511590131e-28, 1.524413235942887e-27),
    c64(-7.8447018688604401e-29, -3.0537676963256186e-29),
    c64(7.9198175441190058e-31, -3.7815907075540573e-30),
    c64(1.717310362718602e-31, 7.6366798425535924e-33),
    c64(8.5105167501585089e-34, 7.3723979435893409e-33),
    c64(-2.9975596524789084e-34, 8.3535607351450638e-35),
    c64(-5.2438413770472262e-36, -1.1548379716377025e-35),
    c64(4.2110675891746605e-37, -2.7493469328542347e-37),
    c64(1.2923519298859779e-38, 1.4488435963406571e-38),
    c64(-4.6738196874449926e-40, 5.6106598232391619e-40),
    c64(-2.2847096126218506e-41, -1.3966922082756918e-41),
    c64(3.7727986973826953e-43, -8.8058190314645544e-43),
    c64(3.2309079427925246e-44, 8.6892654803194889e-45),
    c64(-1.3941164374376022e-46, 1.1327617267509539e-45),
    c64(-3.8044723380433791e-47, 6.1213380938080643e-49),
    c64(-1.8900728501624485e-49, -1.225917996210053e-48),
    c64(3.7928135143376172e-50, -1.1246051243202504e-50),
    c64(5.0580143011982565e-52, 1.1266249089369789e-51),
    c64(-3.2101068362834722e-53, 1.986810051168017e-53),
    c64(-7.1532235569925485e-55, -8.7557610016909518e-55),
    c64(2.2776852002593257e-56, -2.4137455694352545e-56),
    c64(7.7271194299560299e-58, 5.6147413285932843e-58),
    c64(-1.2967071695908121e-59, 2.3642724913070932e-59),
    c64(-6.9474683693220933e-61, -2.7445014476696415e-61),
    c64(5.0651650973642017e-63, -1.9671118923381142e-62),
    c64(5.3788780226185879e-64, 6.9784570978638174e-65),
    c64(-1.0221163043442099e-67, 1.4226269983009644e-65),
    c64(-3.6430350752206549e-67, 4.1531896467280567e-68),
    c64(-2.1456725718765533e-69, -9.0373040803726138e-69),
    c64(2.1719539494564497e-70, -7.9683497944223006e-71),
    c64(2.5620535289583071e-72, 5.0549764272736041e-72),
    c64(-1.1381775247097441e-73, 7.5477467551106754e-74),
    c64(-2.0888774907914681e-75, -2.4748584419411761e-75),
];
