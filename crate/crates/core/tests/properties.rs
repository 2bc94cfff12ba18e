use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use quadtwist::disparity::{
    brute_force_gamma, global_fraction, local_factor, markov_matrix, markov_power_closed_form, FrobeniusClassDatum,
    LocalCharacterDatum, LocalPlaceDatum, Parity, PlaceKind, Statistic,
};
use quadtwist::galois::{
    epsilon, epsilon_from_cycle_type, primes_in, EvenSubsetModel, Frobenius, FrobeniusSampler, GaloisImage,
    IntPolynomial, Permutation, Sign,
};
use quadtwist::gflinalg::{FpMatrix, MatrixGroup, Prime};
use quadtwist::quadform::SymplecticSpace;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn statistic() -> impl Strategy<Value = Statistic> {
    prop_oneof![Just(Statistic::Selmer2), Just(Statistic::TwoInf), Just(Statistic::Sha)]
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

fn character() -> impl Strategy<Value = LocalCharacterDatum> {
    (sign(), 0u32..4, 0u8..2, any::<bool>())
        .prop_map(|(chi, norm, sha, ram)| LocalCharacterDatum::new("c", chi, norm, sha, ram).unwrap())
}

fn place() -> impl Strategy<Value = LocalPlaceDatum> {
    prop::collection::vec(character(), 0..7).prop_map(|mut chars| {
        chars.insert(0, LocalCharacterDatum::trivial("1"));
        LocalPlaceDatum::new("v", PlaceKind::NonarchOther, chars).unwrap()
    })
}

fn sp4() -> &'static (FpMatrix, Vec<FpMatrix>) {
    static SP4: OnceLock<(FpMatrix, Vec<FpMatrix>)> = OnceLock::new();
    SP4.get_or_init(|| {
        let space = SymplecticSpace::hyperbolic(2);
        let elements = space.symplectic_group().unwrap().closure().unwrap();
        (space.gram().clone(), elements)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn brute_force_matches_product_rule(places in prop::collection::vec(place(), 0..5), stat in statistic(), par in parity()) {
        let product: BigRational = places.iter().map(|p| local_factor(p, stat)).product();
        let brute = brute_force_gamma(&places, stat, par, 1 << 20).unwrap();
        prop_assert_eq!(brute, global_fraction(&product, par).unwrap());
    }

    #[test]
    fn local_factors_are_bounded(p in place(), stat in statistic()) {
        let f = local_factor(&p, stat);
        prop_assert!(f.abs() <= BigRational::one());
        if p.characters.len() % 2 == 1 {
            prop_assert!(!f.is_zero());
        }
    }

    #[test]
    fn twoinf_is_selmer_times_sha(c in character()) {
        prop_assert_eq!(c.value(Statistic::TwoInf), c.value(Statistic::Selmer2) * c.value(Statistic::Sha));
    }

    #[test]
    fn closed_form_power_matches_iteration(
        p in prop_oneof![Just(3u32), Just(5), Just(7)],
        r in 0usize..3,
        rho_seed in prop::collection::vec(0u32..7, 2),
        eps in sign(),
        m in 0u32..9,
    ) {
        let rho: Vec<u32> = rho_seed.iter().take(r).map(|x| x % p).collect();
        let class = FrobeniusClassDatum { label: "c".into(), epsilon: eps, rho, weight: BigRational::one() };
        let matrix = markov_matrix(&class, p, r).unwrap();
        prop_assert_eq!(markov_power_closed_form(&class, p, r, m).unwrap(), matrix.iterated_power(m));
    }

    #[test]
    fn classification_is_conjugation_invariant(
        picks in prop::collection::vec(0usize..720, 1..4),
        conj in 0usize..720,
    ) {
        let (gram, elements) = sp4();
        let f2 = Prime::new(2).unwrap();
        let gens: Vec<FpMatrix> = picks.iter().map(|&i| elements[i].clone()).collect();
        let group = MatrixGroup::generated_by(f2, 4, &gens, 1 << 20).unwrap();
        let moved = group.conjugate(&elements[conj]).unwrap();
        let regenerated = group.reduce_generators().unwrap();
        let a = GaloisImage::new(group, gram.clone()).unwrap();
        let b = GaloisImage::new(moved, gram.clone()).unwrap();
        let c = GaloisImage::new(regenerated, gram.clone()).unwrap();
        let (ca, cb, cc) = (a.classify().unwrap(), b.classify().unwrap(), c.classify().unwrap());
        prop_assert_eq!(ca.name(), cb.name());
        prop_assert_eq!(ca.is_homomorphism(), cc.is_homomorphism());
        let minus = |g: &GaloisImage| g.epsilons().unwrap().iter().filter(|&&s| s == Sign::Minus).count();
        prop_assert_eq!(minus(&a), minus(&b));
        prop_assert_eq!(minus(&a), minus(&c));
        prop_assert_eq!(a.theta_criterion().unwrap(), b.theta_criterion().unwrap());
    }

    #[test]
    fn epsilon_formula_matches_model(n in 5usize..11, seed in prop::collection::vec(any::<u32>(), 10)) {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            images.swap(i, seed[i] as usize % (i + 1));
        }
        let perm = Permutation::new(images).unwrap();
        let model = EvenSubsetModel::new(n).unwrap();
        prop_assert_eq!(
            epsilon_from_cycle_type(&perm.cycle_type(), n).unwrap(),
            epsilon(&model.matrix_of(&perm).unwrap())
        );
    }

    #[test]
    fn ramified_iff_discriminant_vanishes(
        coeffs in prop::collection::vec(-20i64..21, 2..7),
        lead in 1i64..4,
        idx in 0usize..40,
    ) {
        let mut c = coeffs;
        c.push(lead);
        let f = IntPolynomial::from_i64(&c).unwrap();
        let disc = f.discriminant().unwrap();
        prop_assume!(!disc.is_zero());
        let primes: Vec<u64> = primes_in(3, 200).into_iter().filter(|&l| lead as u64 % l != 0).collect();
        let l = primes[idx % primes.len()];
        let sampler = FrobeniusSampler::new(f.clone()).unwrap();
        let residue = disc.mod_floor(&BigInt::from(l)).to_u64().unwrap();
        match sampler.cycle_type(l).unwrap() {
            Frobenius::Ramified => prop_assert_eq!(residue, 0),
            Frobenius::Unramified(ct) => {
                prop_assert!(residue != 0);
                prop_assert_eq!(ct.degree(), f.degree());
                // Stickelberger: the sign of Frobenius is the Legendre symbol of the discriminant
                let legendre = BigInt::from(residue).modpow(&BigInt::from((l - 1) / 2), &BigInt::from(l));
                let expected = if legendre.is_one() { Sign::Plus } else { Sign::Minus };
                prop_assert_eq!(ct.sign(), expected);
            }
        }
    }
}

#[test]
fn chebotarev_frequency_of_epsilon_minus() {
    let f = IntPolynomial::parse("x^6+x^4+x+3").unwrap();
    let sampler = FrobeniusSampler::new(f).unwrap();
    let mut total = 0u64;
    let mut minus = 0u64;
    for l in primes_in(3, 100_000) {
        if let Frobenius::Unramified(ct) = sampler.cycle_type(l).unwrap() {
            total += 1;
            minus += u64::from(epsilon_from_cycle_type(&ct, 6).unwrap() == Sign::Minus);
        }
    }
    // ε = −1 on 315 of the 720 elements of S6
    let expected = 315.0 / 720.0;
    let observed = minus as f64 / total as f64;
    let sigma = (expected * (1.0 - expected) / total as f64).sqrt();
    assert!((observed - expected).abs() < 3.0 * sigma, "{minus}/{total} vs {expected} (sigma {sigma})");
}

#[test]
fn sp4_image_is_everything() {
    let (gram, elements) = sp4();
    assert_eq!(elements.len(), 720);
    let space = Arc::new(SymplecticSpace::new(gram.clone()).unwrap());
    assert!(elements.iter().all(|g| space.is_symplectic(g)));
}
