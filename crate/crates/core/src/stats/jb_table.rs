// Generated by `examples/jb_table.rs` (seed 0x4a425441424c4521, 200000 replicates per size).
// Do not edit by hand.

pub(super) const JB_TABLE_MIN_N: usize = 6;
pub(super) const JB_TABLE_MAX_N: usize = 100;
pub(super) const JB_TABLE_ALPHAS: [f64; 3] = [0.01, 0.05, 0.10];

/// Rows are sample sizes 6..=100; columns follow `JB_TABLE_ALPHAS`.
#[rustfmt::skip]
pub(super) const JB_CRITICAL: [[f64; 3]; 95] = [
    [2.4842, 1.5542, 1.0968], // n = 6
    [3.3440, 1.8378, 1.2522], // n = 7
    [4.2408, 2.0853, 1.3933], // n = 8
    [5.0009, 2.3368, 1.5231], // n = 9
    [5.7483, 2.5366, 1.6366], // n = 10
    [6.3989, 2.7021, 1.7224], // n = 11
    [6.9298, 2.9030, 1.8305], // n = 12
    [7.4879, 3.0370, 1.8934], // n = 13
    [7.7882, 3.1280, 1.9755], // n = 14
    [8.4154, 3.3232, 2.0495], // n = 15
    [8.6248, 3.4247, 2.1254], // n = 16
    [9.0710, 3.5553, 2.1859], // n = 17
    [9.1030, 3.6088, 2.2361], // n = 18
    [9.6117, 3.7469, 2.3119], // n = 19
    [9.5431, 3.7881, 2.3450], // n = 20
    [9.8139, 3.8475, 2.3826], // n = 21
    [10.2034, 3.9164, 2.4316], // n = 22
    [10.3572, 4.0239, 2.4741], // n = 23
    [10.4852, 4.0894, 2.5198], // n = 24
    [10.5912, 4.1467, 2.5730], // n = 25
    [10.7250, 4.1583, 2.6112], // n = 26
    [10.7870, 4.2401, 2.6318], // n = 27
    [11.1849, 4.3470, 2.7065], // n = 28
    [11.0471, 4.3259, 2.7023], // n = 29
    [11.2630, 4.4090, 2.7449], // n = 30
    [11.5301, 4.4590, 2.7813], // n = 31
    [11.5334, 4.4796, 2.8028], // n = 32
    [11.7072, 4.5839, 2.8438], // n = 33
    [11.7359, 4.5270, 2.8478], // n = 34
    [12.0089, 4.6138, 2.8877], // n = 35
    [11.6010, 4.6116, 2.8976], // n = 36
    [11.8040, 4.6390, 2.9333], // n = 37
    [12.1231, 4.6998, 2.9649], // n = 38
    [11.9146, 4.6839, 2.9727], // n = 39
    [11.9805, 4.8146, 3.0197], // n = 40
    [11.8481, 4.7640, 3.0277], // n = 41
    [12.2649, 4.8063, 3.0465], // n = 42
    [12.4642, 4.8611, 3.0628], // n = 43
    [12.2443, 4.8271, 3.0566], // n = 44
    [12.5180, 4.8317, 3.1042], // n = 45
    [12.5186, 4.8518, 3.0886], // n = 46
    [12.3257, 4.9448, 3.1441], // n = 47
    [12.1249, 4.9211, 3.1448], // n = 48
    [12.2721, 4.9742, 3.1741], // n = 49
    [12.3359, 4.9608, 3.1921], // n = 50
    [12.3748, 4.9638, 3.1933], // n = 51
    [12.3173, 5.0334, 3.2097], // n = 52
    [12.3608, 5.0107, 3.2174], // n = 53
    [12.3450, 5.0262, 3.2470], // n = 54
    [12.6008, 5.0469, 3.2613], // n = 55
    [12.6645, 5.0863, 3.2815], // n = 56
    [12.3193, 5.0960, 3.2806], // n = 57
    [12.5441, 5.1264, 3.3139], // n = 58
    [12.4546, 5.1381, 3.3262], // n = 59
    [12.4831, 5.0816, 3.3155], // n = 60
    [12.3792, 5.1039, 3.3141], // n = 61
    [12.5148, 5.1412, 3.3364], // n = 62
    [12.4045, 5.1627, 3.3582], // n = 63
    [12.8465, 5.1961, 3.3764], // n = 64
    [12.4626, 5.1830, 3.3838], // n = 65
    [12.3055, 5.1887, 3.4071], // n = 66
    [12.6924, 5.2151, 3.4057], // n = 67
    [12.4796, 5.1981, 3.4088], // n = 68
    [12.4803, 5.2439, 3.4303], // n = 69
    [12.5952, 5.2026, 3.4226], // n = 70
    [12.7299, 5.2341, 3.4426], // n = 71
    [12.9212, 5.2745, 3.4630], // n = 72
    [12.5495, 5.2697, 3.4641], // n = 73
    [12.7770, 5.3034, 3.4692], // n = 74
    [12.6472, 5.2484, 3.4756], // n = 75
    [12.5203, 5.2525, 3.4823], // n = 76
    [12.4152, 5.3118, 3.5116], // n = 77
    [12.5504, 5.3200, 3.5464], // n = 78
    [12.6647, 5.3175, 3.5345], // n = 79
    [12.6914, 5.3736, 3.5541], // n = 80
    [12.3903, 5.2736, 3.5150], // n = 81
    [12.6249, 5.3206, 3.5393], // n = 82
    [12.7185, 5.3377, 3.5442], // n = 83
    [12.6766, 5.3669, 3.5756], // n = 84
    [12.5321, 5.3249, 3.5674], // n = 85
    [12.8649, 5.3697, 3.5890], // n = 86
    [12.3660, 5.3464, 3.5770], // n = 87
    [12.5107, 5.3493, 3.5925], // n = 88
    [12.5184, 5.3779, 3.6023], // n = 89
    [12.4706, 5.3287, 3.5886], // n = 90
    [12.7533, 5.3633, 3.6001], // n = 91
    [12.6394, 5.3563, 3.6174], // n = 92
    [12.4776, 5.3867, 3.6417], // n = 93
    [12.5459, 5.3839, 3.6327], // n = 94
    [12.3402, 5.4038, 3.6508], // n = 95
    [12.4069, 5.4252, 3.6642], // n = 96
    [12.6705, 5.4271, 3.6658], // n = 97
    [12.4868, 5.4600, 3.6771], // n = 98
    [12.4378, 5.4343, 3.6770], // n = 99
    [12.5761, 5.4257, 3.6757], // n = 100
];
