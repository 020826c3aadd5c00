#![allow(clippy::excessive_precision)]

//! Tabulated Gauss-Legendre rules.

// Generated with 50-digit arithmetic; 25 significant digits retained.
// Each rule stores the non-negative half of the symmetric node set on [-1, 1],
// in increasing order, with matching weights.

pub(super) struct HalfRule {
    pub nodes: &'static [f64],
    pub weights: &'static [f64],
}

const NODES_2: [f64; 1] = [0.5773502691896257645091488];
const WEIGHTS_2: [f64; 1] = [1.0];

const NODES_3: [f64; 2] = [0.0, 0.7745966692414833770358531];
const WEIGHTS_3: [f64; 2] = [0.8888888888888888888888889, 0.5555555555555555555555556];

const NODES_4: [f64; 2] = [0.3399810435848562648026658, 0.8611363115940525752239465];
const WEIGHTS_4: [f64; 2] = [0.6521451548625461426269361, 0.3478548451374538573730639];

const NODES_5: [f64; 3] = [
    0.0,
    0.5384693101056830910363144,
    0.9061798459386639927976269,
];
const WEIGHTS_5: [f64; 3] = [
    0.5688888888888888888888889,
    0.4786286704993664680412915,
    0.236926885056189087514264,
];

const NODES_6: [f64; 3] = [
    0.2386191860831969086305017,
    0.6612093864662645136613996,
    0.9324695142031520278123016,
];
const WEIGHTS_6: [f64; 3] = [
    0.4679139345726910473898703,
    0.3607615730481386075698335,
    0.1713244923791703450402961,
];

const NODES_7: [f64; 4] = [
    0.0,
    0.4058451513773971669066064,
    0.7415311855993944398638648,
    0.9491079123427585245261897,
];
const WEIGHTS_7: [f64; 4] = [
    0.417959183673469387755102,
    0.3818300505051189449503698,
    0.2797053914892766679014678,
    0.1294849661688696932706114,
];

const NODES_8: [f64; 4] = [
    0.1834346424956498049394761,
    0.525532409916328985817739,
    0.7966664774136267395915539,
    0.9602898564975362316835609,
];
const WEIGHTS_8: [f64; 4] = [
    0.3626837833783619829651504,
    0.3137066458778872873379622,
    0.222381034453374470544356,
    0.1012285362903762591525314,
];

const NODES_9: [f64; 5] = [
    0.0,
    0.324253423403808929038538,
    0.613371432700590397308702,
    0.8360311073266357942994298,
    0.9681602395076260898355762,
];
const WEIGHTS_9: [f64; 5] = [
    0.3302393550012597631645251,
    0.3123470770400028400686304,
    0.2606106964029354623187429,
    0.180648160694857404058472,
    0.08127438836157441197189216,
];

const NODES_10: [f64; 5] = [
    0.148874338981631210884826,
    0.4333953941292471907992659,
    0.6794095682990244062343274,
    0.8650633666889845107320967,
    0.973906528517171720077964,
];
const WEIGHTS_10: [f64; 5] = [
    0.295524224714752870173893,
    0.2692667193099963550912269,
    0.2190863625159820439955349,
    0.1494513491505805931457763,
    0.06667134430868813759356881,
];

const NODES_11: [f64; 6] = [
    0.0,
    0.269543155952344972331532,
    0.5190961292068118159257257,
    0.7301520055740493240934163,
    0.8870625997680952990751578,
    0.978228658146056992803938,
];
const WEIGHTS_11: [f64; 6] = [
    0.2729250867779006307144835,
    0.2628045445102466621806889,
    0.2331937645919904799185237,
    0.1862902109277342514260976,
    0.1255803694649046246346943,
    0.05566856711617366648275372,
];

const NODES_12: [f64; 6] = [
    0.1252334085114689154724414,
    0.3678314989981801937526915,
    0.5873179542866174472967024,
    0.7699026741943046870368938,
    0.9041172563704748566784659,
    0.9815606342467192506905491,
];
const WEIGHTS_12: [f64; 6] = [
    0.2491470458134027850005624,
    0.2334925365383548087608499,
    0.2031674267230659217490645,
    0.1600783285433462263346525,
    0.1069393259953184309602547,
    0.04717533638651182719461596,
];

const NODES_13: [f64; 7] = [
    0.0,
    0.2304583159551347940655281,
    0.4484927510364468528779129,
    0.6423493394403402206439846,
    0.8015780907333099127942065,
    0.9175983992229779652065478,
    0.9841830547185881494728294,
];
const WEIGHTS_13: [f64; 7] = [
    0.2325515532308739101945895,
    0.2262831802628972384120902,
    0.2078160475368885023125232,
    0.1781459807619457382800467,
    0.1388735102197872384636018,
    0.09212149983772844791442178,
    0.04048400476531587952002159,
];

const NODES_14: [f64; 7] = [
    0.1080549487073436620662447,
    0.3191123689278897604356718,
    0.5152486363581540919652907,
    0.6872929048116854701480198,
    0.8272013150697649931897947,
    0.9284348836635735173363911,
    0.9862838086968123388415973,
];
const WEIGHTS_14: [f64; 7] = [
    0.2152638534631577901958764,
    0.2051984637212956039659241,
    0.1855383974779378137417166,
    0.1572031671581935345696019,
    0.1215185706879031846894148,
    0.08015808715976020980563328,
    0.03511946033175186303183288,
];

const NODES_15: [f64; 8] = [
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657,
];
const WEIGHTS_15: [f64; 8] = [
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.07036604748810812470926742,
    0.03075324199611726835462839,
];

const NODES_16: [f64; 8] = [
    0.09501250983763744018531934,
    0.2816035507792589132304605,
    0.4580167776572273863424194,
    0.6178762444026437484466718,
    0.7554044083550030338951012,
    0.8656312023878317438804679,
    0.9445750230732325760779884,
    0.9894009349916499325961542,
];
const WEIGHTS_16: [f64; 8] = [
    0.1894506104550684962853967,
    0.1826034150449235888667637,
    0.1691565193950025381893121,
    0.1495959888165767320815017,
    0.1246289712555338720524763,
    0.09515851168249278480992511,
    0.06225352393864789286284384,
    0.02715245941175409485178057,
];

const NODES_24: [f64; 12] = [
    0.06405689286260562608504308,
    0.1911188674736163091586398,
    0.3150426796961633743867933,
    0.4337935076260451384870842,
    0.5454214713888395356583756,
    0.6480936519369755692524958,
    0.7401241915785543642438281,
    0.8200019859739029219539499,
    0.8864155270044010342131543,
    0.938274552002732758523649,
    0.974728555971309498198392,
    0.9951872199970213601799974,
];
const WEIGHTS_24: [f64; 12] = [
    0.1279381953467521569740562,
    0.1258374563468282961213754,
    0.1216704729278033912044632,
    0.1155056680537256013533445,
    0.1074442701159656347825773,
    0.09761865210411388826988066,
    0.0861901615319532759171852,
    0.07334648141108030573403362,
    0.05929858491543678074636776,
    0.04427743881741980616860275,
    0.02853138862893366318130782,
    0.01234122979998719954680567,
];

const NODES_32: [f64; 16] = [
    0.04830766568773831623481257,
    0.1444719615827964934851864,
    0.2392873622521370745446032,
    0.3318686022821276497799168,
    0.4213512761306353453641194,
    0.5068999089322293900237475,
    0.5877157572407623290407455,
    0.6630442669302152009751152,
    0.7321821187402896803874267,
    0.7944837959679424069630973,
    0.849367613732569970133693,
    0.8963211557660521239653072,
    0.9349060759377396891709191,
    0.9647622555875064307738119,
    0.985611511545268335400175,
    0.9972638618494815635449811,
];
const WEIGHTS_32: [f64; 16] = [
    0.09654008851472780056676483,
    0.095638720079274859419082,
    0.09384439908080456563918024,
    0.09117387869576388471286858,
    0.08765209300440381114277146,
    0.08331192422694675522219907,
    0.07819389578707030647174092,
    0.07234579410884850622539936,
    0.06582222277636184683765006,
    0.05868409347853554714528364,
    0.05099805926237617619616324,
    0.04283589802222668065687865,
    0.03427386291302143310268773,
    0.02539206530926205945575259,
    0.01627439473090567060517056,
    0.007018610009470096600407064,
];

const NODES_48: [f64; 24] = [
    0.03238017096286936203332224,
    0.09700469920946269893005396,
    0.1612223560688917180564374,
    0.2247637903946890612248654,
    0.2873624873554555767358865,
    0.3487558862921607381598179,
    0.4086864819907167299162255,
    0.4669029047509584045449289,
    0.5231609747222330336782259,
    0.5772247260839727038178092,
    0.6288673967765136239951649,
    0.6778723796326639052118513,
    0.7240341309238146546744822,
    0.7671590325157403392538554,
    0.807066204029442627082553,
    0.8435882616243935307110898,
    0.8765720202742478859056936,
    0.9058791367155696728220748,
    0.9313866907065543331141744,
    0.9529877031604308607229607,
    0.970591592546247250461412,
    0.9841245837228268577445836,
    0.9935301722663507575479288,
    0.9987710072524261186005415,
];
const WEIGHTS_48: [f64; 24] = [
    0.06473769681268392250302494,
    0.06446616443595008220650419,
    0.0639242385846481866239062,
    0.06311419228625402565712602,
    0.06203942315989266390419778,
    0.06070443916589388005296923,
    0.05911483969839563574647482,
    0.05727729210040321570515023,
    0.0551995036999841628682035,
    0.05289018948519366709550506,
    0.05035903555385447495780762,
    0.04761665849249047482590662,
    0.04467456085669428041944859,
    0.04154508294346474921405882,
    0.03824135106583070631721726,
    0.03477722256477043889254859,
    0.03116722783279808890206576,
    0.02742650970835694820007384,
    0.0235707608393243791405193,
    0.01961616045735552781446072,
    0.01557931572294384872817696,
    0.01147723457923453948959267,
    0.00732755390127626210238398,
    0.003153346052305838632677312,
];

const NODES_64: [f64; 32] = [
    0.02435029266342443250895584,
    0.07299312178779903944954294,
    0.1214628192961205544703765,
    0.1696444204239928180373136,
    0.2174236437400070841496487,
    0.2646871622087674163739642,
    0.3113228719902109561575127,
    0.3572201583376681159504426,
    0.4022701579639916036957668,
    0.4463660172534640879849477,
    0.4894031457070529574785263,
    0.5312794640198945456580139,
    0.5718956462026340342838781,
    0.611155355172393250248853,
    0.6489654712546573398577612,
    0.6852363130542332425635584,
    0.7198818501716108268489402,
    0.7528199072605318966118638,
    0.7839723589433414076102205,
    0.8132653151227975597419233,
    0.8406292962525803627516915,
    0.8659993981540928197607834,
    0.889315445995114105853404,
    0.9105221370785028057563807,
    0.9295691721319395758214902,
    0.9464113748584028160624815,
    0.9610087996520537189186141,
    0.9733268277899109637418535,
    0.9833362538846259569312993,
    0.9910133714767443207393824,
    0.9963401167719552793469245,
    0.9993050417357721394569056,
];
const WEIGHTS_64: [f64; 32] = [
    0.04869095700913972038336539,
    0.04857546744150342693479907,
    0.04834476223480295716976953,
    0.04799938859645830772812618,
    0.04754016571483030866228221,
    0.04696818281621001732532629,
    0.04628479658131441729595325,
    0.045491627927418144479771,
    0.04459055816375656306013471,
    0.04358372452932345337682786,
    0.04247351512365358900733977,
    0.0412625632426235286101563,
    0.03995374113272034138665693,
    0.0385501531786156291289625,
    0.0370551285402400460404151,
    0.03547221325688238381069315,
    0.03380516183714160939156548,
    0.0320579283548515535854675,
    0.03023465707240247886797406,
    0.02833967261425948322751131,
    0.02637746971505465867169179,
    0.02435270256871087333817755,
    0.02227017380838325415929833,
    0.02013482315353020937234032,
    0.0179517157756973430850453,
    0.015726030476024719321966,
    0.01346304789671864259806077,
    0.01116813946013112881859049,
    0.008846759826363947723030915,
    0.00650445796897836285611736,
    0.004147033260562467635287536,
    0.001783280721696432947296079,
];

pub const TABULATED_COUNTS: [usize; 19] = [
    2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 24, 32, 48, 64,
];

pub(super) fn half_rule(count: usize) -> Option<HalfRule> {
    let (nodes, weights): (&'static [f64], &'static [f64]) = match count {
        2 => (&NODES_2, &WEIGHTS_2),
        3 => (&NODES_3, &WEIGHTS_3),
        4 => (&NODES_4, &WEIGHTS_4),
        5 => (&NODES_5, &WEIGHTS_5),
        6 => (&NODES_6, &WEIGHTS_6),
        7 => (&NODES_7, &WEIGHTS_7),
        8 => (&NODES_8, &WEIGHTS_8),
        9 => (&NODES_9, &WEIGHTS_9),
        10 => (&NODES_10, &WEIGHTS_10),
        11 => (&NODES_11, &WEIGHTS_11),
        12 => (&NODES_12, &WEIGHTS_12),
        13 => (&NODES_13, &WEIGHTS_13),
        14 => (&NODES_14, &WEIGHTS_14),
        15 => (&NODES_15, &WEIGHTS_15),
        16 => (&NODES_16, &WEIGHTS_16),
        24 => (&NODES_24, &WEIGHTS_24),
        32 => (&NODES_32, &WEIGHTS_32),
        48 => (&NODES_48, &WEIGHTS_48),
        64 => (&NODES_64, &WEIGHTS_64),
        _ => return None,
    };
    Some(HalfRule { nodes, weights })
}
